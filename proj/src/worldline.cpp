#include <algorithm>
#include <cmath>
#include <sstream>

#include "retrobell/dynamics.hpp"
#include "retrobell/errors.hpp"

namespace retrobell {

namespace {
constexpr double kTimeSlack = 1e-12;
}

Worldline::Worldline(std::vector<WorldlineSegment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw InvalidConfig("worldline needs at least one segment");
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        const auto& s = segments_[k];
        if (!(s.t_end > s.t_begin)) throw InvalidConfig("worldline segment times must increase");
        if (!(std::abs(s.velocity) < 1.0)) throw InvalidConfig("worldline speed must be below c");
        if (k > 0) {
            const auto& prev = segments_[k - 1];
            if (std::abs(prev.t_end - s.t_begin) > kTimeSlack ||
                std::abs(prev.position(prev.t_end) - s.x_begin) > kTimeSlack) {
                throw InvalidConfig("worldline segments must join continuously");
            }
        }
    }
}

Worldline Worldline::inertial(double t_begin, double t_end, double x_begin, double velocity) {
    return Worldline({WorldlineSegment{t_begin, t_end, x_begin, velocity}});
}

Worldline Worldline::stationary(double t_begin, double t_end, double x) {
    return inertial(t_begin, t_end, x, 0.0);
}

double Worldline::position(double t) const {
    for (const auto& s : segments_) {
        if (t <= s.t_end) return s.position(t);
    }
    return segments_.back().position(t);
}

LightConeTimes light_cone_times(const Worldline& i, double t, const Worldline& j) {
    const double xi = i.position(t);
    LightConeTimes out;
    for (const auto& seg : j.segments()) {
        // x_j(tau) = k + u tau on this segment.
        const double u = seg.velocity;
        const double k = seg.x_begin - u * seg.t_begin;
        const auto on_segment = [&](double tau) {
            return tau >= seg.t_begin - kTimeSlack && tau <= seg.t_end + kTimeSlack;
        };
        for (double s : {1.0, -1.0}) {
            // Retarded: t - tau = s (x_i - x_j(tau)), requiring t - tau >= 0.
            if (!out.retarded) {
                const double tau = (t - s * (xi - k)) / (1.0 - s * u);
                if (on_segment(tau) && t - tau >= -kTimeSlack &&
                    s * (xi - (k + u * tau)) >= -kTimeSlack) {
                    out.retarded = std::clamp(tau, seg.t_begin, seg.t_end);
                }
            }
            // Advanced: tau - t = s (x_i - x_j(tau)), requiring tau - t >= 0.
            if (!out.advanced) {
                const double tau = (t + s * (xi - k)) / (1.0 + s * u);
                if (on_segment(tau) && tau - t >= -kTimeSlack &&
                    s * (xi - (k + u * tau)) >= -kTimeSlack) {
                    out.advanced = std::clamp(tau, seg.t_begin, seg.t_end);
                }
            }
        }
    }
    return out;
}

}  // namespace retrobell
