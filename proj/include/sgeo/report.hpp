#ifndef SGEO_REPORT_HPP
#define SGEO_REPORT_HPP

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace sgeo {

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

/// Outcome of one axiom or identity check.
struct CheckReport {
    std::string name;
    Verdict verdict = Verdict::inconclusive;
    std::map<std::string, double> residuals;
    std::map<std::string, double> tolerances;
    std::map<std::string, std::vector<double>> series;
    std::map<std::string, std::string> notes;
    std::vector<std::string> diagnostics;

    bool passed() const { return verdict == Verdict::pass; }
    bool failed() const { return verdict == Verdict::fail; }

    CheckReport& residual(const std::string& key, double value, double tol) {
        residuals[key] = value;
        tolerances[key] = tol;
        return *this;
    }

    /// pass iff every residual with a tolerance is finite and within it.
    void decide_from_residuals() {
        verdict = Verdict::pass;
        for (const auto& [k, v] : residuals) {
            auto t = tolerances.find(k);
            if (t == tolerances.end()) continue;
            if (!std::isfinite(v) || v > t->second) {
                verdict = Verdict::fail;
                diagnostics.push_back(k + " = " + std::to_string(v) + " exceeds " + std::to_string(t->second));
            }
        }
    }
};

/// Finite-scale surrogate for a generalized limit: a trailing-window reading
/// plus the drift of that reading under doubling of the scale parameter.
struct AsymptoticEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::vector<double> window_values;
    double trend_slope = 0.0;
    bool converged = false;
    double diagnostic = 0.0;
    std::map<std::string, double> extras;
};

}  // namespace sgeo

#endif  // SGEO_REPORT_HPP
