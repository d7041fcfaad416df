#ifndef SPDT_TIME_GRID_HPP
#define SPDT_TIME_GRID_HPP

#include <cstdint>

#include "spdt/errors.hpp"

namespace spdt {

constexpr std::uint32_t kSecondsPerDay = 86400;

// Discrete simulation clock. Times inside networks are step indices;
// seconds appear only in the exposure computation and in GPS extraction.
struct TimeGrid {
    std::uint32_t step_seconds = 300;
    std::uint32_t horizon_steps = 0;

    TimeGrid() = default;
    TimeGrid(std::uint32_t step_s, std::uint32_t horizon)
        : step_seconds(step_s), horizon_steps(horizon)
    {
        if (step_seconds == 0 || kSecondsPerDay % step_seconds != 0)
            throw data_error("step_seconds must divide 86400, got " + std::to_string(step_seconds));
        if (horizon_steps == 0)
            throw data_error("horizon_steps must be positive");
        if (horizon_steps % steps_per_day() != 0)
            throw data_error("horizon_steps (" + std::to_string(horizon_steps) +
                             ") must be a whole number of days of " +
                             std::to_string(steps_per_day()) + " steps");
    }

    static TimeGrid from_days(std::uint32_t step_s, std::uint32_t days)
    {
        if (step_s == 0 || kSecondsPerDay % step_s != 0)
            throw data_error("step_seconds must divide 86400, got " + std::to_string(step_s));
        return TimeGrid(step_s, days * (kSecondsPerDay / step_s));
    }

    std::uint32_t steps_per_day() const { return kSecondsPerDay / step_seconds; }
    std::uint32_t horizon_days() const { return horizon_steps / steps_per_day(); }

    double step_to_seconds(std::uint64_t step) const { return double(step) * step_seconds; }
    std::uint32_t day_of_step(std::uint64_t step) const
    {
        return std::uint32_t(step / steps_per_day());
    }
};

} // namespace spdt

#endif
