#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tscc {

// Tuning knobs for the streaming controller and the queue model.
// Defaults follow the common evaluation setup for tile-based 360 streaming
// with cybersickness control: 4 s packet queue targeting half occupancy,
// a slow-draining sickness queue, and a 7-step FoV shrink ladder.
struct Config {
    double cp_seconds = 4.0;       // packet queue capacity (seconds of video)
    double cs_capacity = 1000.0;   // sickness queue capacity
    double lambda_target = 0.5;    // targeted packet queue occupancy
    double omega = 0.05;           // sickness drain per slot (user adaptation)
    double k_dof = 0.1;            // bandwidth/stimulus cut when DoF blur is on
    double xi = 1.0;               // weight of video quality loss in the objective
    double rho = 2.5;              // weight of sickness occupancy in the objective
    double epsilon = 0.05;         // viewing-probability threshold for tile trimming
    int alpha = 10;                // local search stops after alpha visits to one assignment
    int nsl_capacity = 20;         // neighbor search list (tabu memory) size

    // FoV shrink ratios, descending; 1.0 means no shrink.
    std::vector<double> sfov_ladder = {1.00, 0.95, 0.90, 0.85, 0.80, 0.75, 0.70};

    double sigma_y_deg = 10.0;     // yaw prediction-error spread
    double sigma_p_deg = 10.0;     // pitch prediction-error spread
    double gamma_init_mbit = 4.0;  // assumed viewport bandwidth before the first fetch
    double bw_unit_mbit = 0.1;     // quantization unit for the assignment DP budget axis
    double viewport_w_deg = 100.0;
    double viewport_h_deg = 100.0;

    double qp_init = 0.5;          // initial packet queue occupancy
    double qs_init = 0.0;          // initial sickness queue occupancy

    void validate() const {
        if (!(cp_seconds > 0)) throw std::invalid_argument("config: cp_seconds must be > 0");
        if (!(cs_capacity > 0)) throw std::invalid_argument("config: cs_capacity must be > 0");
        if (!(lambda_target >= 0 && lambda_target < 1))
            throw std::invalid_argument("config: lambda_target must be in [0,1)");
        if (!(k_dof >= 0 && k_dof < 1)) throw std::invalid_argument("config: k_dof must be in [0,1)");
        if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("config: epsilon must be in (0,1)");
        if (!(bw_unit_mbit > 0)) throw std::invalid_argument("config: bw_unit_mbit must be > 0");
        if (alpha < 1) throw std::invalid_argument("config: alpha must be >= 1");
        if (nsl_capacity < 1) throw std::invalid_argument("config: nsl_capacity must be >= 1");
        if (sfov_ladder.empty()) throw std::invalid_argument("config: sfov_ladder must not be empty");
        double prev = 2.0;
        for (double s : sfov_ladder) {
            if (!(s >= 0.7 && s <= 1.0))
                throw std::invalid_argument("config: sfov_ladder entries must be in [0.7,1.0]");
            if (!(s < prev)) throw std::invalid_argument("config: sfov_ladder must be strictly descending");
            prev = s;
        }
        if (!(sigma_y_deg > 0 && sigma_p_deg > 0))
            throw std::invalid_argument("config: sigma must be > 0");
        if (!(viewport_w_deg >= 0 && viewport_h_deg >= 0))
            throw std::invalid_argument("config: viewport size must be >= 0");
        if (!(gamma_init_mbit >= 0)) throw std::invalid_argument("config: gamma_init_mbit must be >= 0");
        if (!(qp_init >= 0 && qp_init <= 1 && qs_init >= 0 && qs_init <= 1))
            throw std::invalid_argument("config: initial occupancies must be in [0,1]");
    }
};

}  // namespace tscc
