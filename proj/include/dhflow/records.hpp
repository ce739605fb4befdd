#pragma once

#include <vector>

#include "dhflow/energy.hpp"
#include "dhflow/torus_grid.hpp"

namespace dhflow {

struct MonitorRecord {
    double t = 0.0;
    EnergyReport energy;
    double kinetic_u = 0.0;
    double kinetic_psi = 0.0;
    double el_residual_u = 0.0;
    double el_residual_psi = 0.0;
    std::vector<double> max_local_F;  // one entry per monitored radius
    double dt = 0.0;                  // last accepted step
    double cumulative_dissipation = 0.0;
    bool monotone_ok = true;
    bool dissipation_identity_ok = true;
    bool pointwise_bound_ok = true;
};

enum class EventTrigger { Threshold, DtFloor };

struct SingularityEvent {
    double t_detected = 0.0;
    GridPoint center;
    double x = 0.0;
    double y = 0.0;
    double radius = 0.0;
    double local_F = 0.0;
    EventTrigger trigger = EventTrigger::Threshold;
};

const char* trigger_name(EventTrigger t);

}  // namespace dhflow
