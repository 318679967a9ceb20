#include "rec/simplex.hpp"

#include <cmath>
#include <limits>

namespace rec {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

class Tableau {
public:
    Tableau(const LpProblem& lp, const SimplexOptions& opt);

    LpResult solve();

private:
    enum class Outcome { optimal, unbounded, iteration_limit };

    double& at(std::size_t i, std::size_t j) { return T_[i * N_ + j]; }
    bool artificial(std::size_t id) const { return id >= N_; }
    double basic_lower(std::size_t id) const { return artificial(id) ? 0.0 : lo_[id]; }
    double basic_upper(std::size_t id) const { return artificial(id) ? art_upper_ : up_[id]; }

    void price(const std::vector<double>& cost);
    Outcome run(const std::vector<double>& cost);
    void pivot(std::size_t r, std::size_t j);
    void refresh_basic_values();
    double artificial_mass() const;

    const LpProblem& lp_;
    SimplexOptions opt_;
    std::size_t m_, n_, N_;
    std::vector<double> T_, beta_, d_, lo_, up_, x_;
    std::vector<std::size_t> basis_, row_of_, nz_;
    double art_upper_ = std::numeric_limits<double>::infinity();
    std::size_t iterations_ = 0;
};

Tableau::Tableau(const LpProblem& lp, const SimplexOptions& opt)
    : lp_(lp), opt_(opt), m_(lp.rows.size()), n_(lp.cost.size()), N_(n_ + m_) {
    T_.assign(m_ * N_, 0.0);
    beta_.assign(m_, 0.0);
    d_.assign(N_, 0.0);
    lo_.resize(N_);
    up_.resize(N_);
    x_.assign(N_, 0.0);
    basis_.resize(m_);
    row_of_.assign(N_, npos);

    for (std::size_t j = 0; j < n_; ++j) {
        lo_[j] = lp.lower[j];
        up_[j] = lp.upper[j];
        x_[j] = std::isfinite(lo_[j]) ? lo_[j] : (std::isfinite(up_[j]) ? up_[j] : 0.0);
    }
    for (std::size_t i = 0; i < m_; ++i) {
        const auto& row = lp.rows[i];
        const std::size_t s = n_ + i;
        lo_[s] = row.sense == Sense::ge ? -infinity : 0.0;
        up_[s] = row.sense == Sense::le ? infinity : 0.0;

        double r = row.rhs;
        for (const Term& t : row.terms) r -= t.coef * x_[t.var];
        // slack starts basic when it can absorb the residual, else an artificial does
        const bool slack_ok = r >= lo_[s] && r <= up_[s];
        const double sign = slack_ok || r >= 0.0 ? 1.0 : -1.0;
        for (const Term& t : row.terms) at(i, t.var) += sign * t.coef;
        at(i, s) = sign;
        beta_[i] = sign * r;
        if (slack_ok) {
            basis_[i] = s;
            row_of_[s] = i;
        } else {
            basis_[i] = N_ + i;
        }
    }
}

void Tableau::price(const std::vector<double>& cost) {
    std::fill(d_.begin(), d_.end(), 0.0);
    for (std::size_t j = 0; j < N_; ++j) d_[j] = cost[j];
    for (std::size_t i = 0; i < m_; ++i) {
        const std::size_t b = basis_[i];
        const double cb = artificial(b) ? (art_upper_ > 0.0 ? -1.0 : 0.0) : cost[b];
        if (cb == 0.0) continue;
        const double* row = &T_[i * N_];
        for (std::size_t j = 0; j < N_; ++j) d_[j] -= cb * row[j];
    }
    for (std::size_t i = 0; i < m_; ++i)
        if (!artificial(basis_[i])) d_[basis_[i]] = 0.0;
}

void Tableau::pivot(std::size_t r, std::size_t j) {
    double* prow = &T_[r * N_];
    const double inv = 1.0 / prow[j];
    nz_.clear();
    for (std::size_t c = 0; c < N_; ++c) {
        if (prow[c] == 0.0) continue;
        prow[c] *= inv;
        nz_.push_back(c);
    }
    prow[j] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
        if (i == r) continue;
        double* row = &T_[i * N_];
        const double f = row[j];
        if (f == 0.0) continue;
        for (std::size_t c : nz_) {
            const double v = row[c] - f * prow[c];
            row[c] = std::abs(v) < 1e-14 ? 0.0 : v;  // keep cancellation noise out of the tableau
        }
        row[j] = 0.0;
    }
    const double dj = d_[j];
    if (dj != 0.0)
        for (std::size_t c : nz_) d_[c] -= dj * prow[c];
    d_[j] = 0.0;
}

void Tableau::refresh_basic_values() {
    // B^-1 sits in the slack block of the tableau.
    std::vector<double> r(m_);
    for (std::size_t i = 0; i < m_; ++i) {
        const auto& row = lp_.rows[i];
        double v = row.rhs;
        for (const Term& t : row.terms)
            if (row_of_[t.var] == npos) v -= t.coef * x_[t.var];
        const std::size_t s = n_ + i;
        if (row_of_[s] == npos) v -= x_[s];
        r[i] = v;
    }
    for (std::size_t i = 0; i < m_; ++i) {
        const double* binv = &T_[i * N_ + n_];
        double v = 0.0;
        for (std::size_t c = 0; c < m_; ++c) v += binv[c] * r[c];
        beta_[i] = v;
    }
}

double Tableau::artificial_mass() const {
    double mass = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
        if (artificial(basis_[i])) mass += std::abs(beta_[i]);
    return mass;
}

Tableau::Outcome Tableau::run(const std::vector<double>& cost) {
    price(cost);
    std::size_t degenerate = 0;
    for (;;) {
        if (iterations_ >= opt_.max_iterations) return Outcome::iteration_limit;
        const bool bland = degenerate >= opt_.degenerate_before_bland;

        std::size_t enter = npos;
        double best = 0.0;
        for (std::size_t j = 0; j < N_; ++j) {
            if (row_of_[j] != npos) continue;
            const double dj = d_[j];
            const bool up_ok = dj > opt_.optimality_tol && x_[j] < up_[j];
            const bool down_ok = dj < -opt_.optimality_tol && x_[j] > lo_[j];
            if (!up_ok && !down_ok) continue;
            if (bland) {
                enter = j;
                break;
            }
            if (std::abs(dj) > best) {
                best = std::abs(dj);
                enter = j;
            }
        }
        if (enter == npos) return Outcome::optimal;

        const double dir = d_[enter] > 0.0 ? 1.0 : -1.0;
        double theta = (std::isfinite(lo_[enter]) && std::isfinite(up_[enter])) ? up_[enter] - lo_[enter]
                                                                                 : infinity;
        std::size_t leave = npos;
        double leave_alpha = 0.0;
        bool leave_to_upper = false;
        for (std::size_t i = 0; i < m_; ++i) {
            const double alpha = at(i, enter) * dir;
            if (std::abs(alpha) <= opt_.pivot_tol) continue;
            const std::size_t b = basis_[i];
            double t;
            bool to_upper;
            if (alpha > 0.0) {
                const double lb = basic_lower(b);
                if (!std::isfinite(lb)) continue;
                t = (beta_[i] - lb) / alpha;
                to_upper = false;
            } else {
                const double ub = basic_upper(b);
                if (!std::isfinite(ub)) continue;
                t = (ub - beta_[i]) / -alpha;
                to_upper = true;
            }
            if (t < 0.0) t = 0.0;
            bool take = false;
            if (t < theta - 1e-12)
                take = true;
            else if (t <= theta + 1e-12 && leave != npos)
                take = bland ? b < basis_[leave] : std::abs(alpha) > std::abs(leave_alpha);
            if (take) {
                theta = std::min(theta, t);
                leave = i;
                leave_alpha = alpha;
                leave_to_upper = to_upper;
            }
        }
        if (!std::isfinite(theta)) return Outcome::unbounded;

        ++iterations_;
        degenerate = theta < 1e-12 ? degenerate + 1 : 0;

        for (std::size_t i = 0; i < m_; ++i) beta_[i] -= at(i, enter) * dir * theta;

        if (leave == npos) {
            x_[enter] = dir > 0.0 ? up_[enter] : lo_[enter];
            continue;
        }
        const double entered_value = x_[enter] + dir * theta;
        const std::size_t out = basis_[leave];
        if (!artificial(out)) {
            x_[out] = leave_to_upper ? up_[out] : lo_[out];
            row_of_[out] = npos;
        }
        basis_[leave] = enter;
        row_of_[enter] = leave;
        pivot(leave, enter);
        beta_[leave] = entered_value;
        if (iterations_ % 100 == 0) refresh_basic_values();
    }
}

LpResult Tableau::solve() {
    LpResult res;
    std::vector<double> zero(N_, 0.0);
    const bool need_phase_one = [&] {
        for (std::size_t i = 0; i < m_; ++i)
            if (artificial(basis_[i])) return true;
        return false;
    }();
    if (need_phase_one) {
        art_upper_ = infinity;
        if (run(zero) == Outcome::iteration_limit) {
            res.iterations = iterations_;
            return res;
        }
        refresh_basic_values();
        if (artificial_mass() > opt_.feasibility_tol) {
            res.status = LpStatus::infeasible;
            res.iterations = iterations_;
            return res;
        }
    }
    art_upper_ = 0.0;
    std::vector<double> cost(N_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost[j] = lp_.cost[j];
    const Outcome out = run(cost);
    res.iterations = iterations_;
    if (out == Outcome::unbounded) {
        res.status = LpStatus::unbounded;
        return res;
    }
    if (out == Outcome::iteration_limit) return res;
    refresh_basic_values();

    res.status = LpStatus::optimal;
    res.x.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        double v = row_of_[j] == npos ? x_[j] : beta_[row_of_[j]];
        // snap round-off back onto the bound
        if (v < lo_[j] && v > lo_[j] - 1e-9) v = lo_[j];
        if (v > up_[j] && v < up_[j] + 1e-9) v = up_[j];
        res.x[j] = v;
        res.objective += lp_.cost[j] * v;
    }
    return res;
}

}  // namespace

LpResult solve_lp(const LpProblem& lp, const SimplexOptions& opt) {
    for (std::size_t j = 0; j < lp.cost.size(); ++j)
        if (lp.lower[j] > lp.upper[j]) return {LpStatus::infeasible, 0.0, {}, 0};
    Tableau t(lp, opt);
    return t.solve();
}

LpProblem relaxation_of(const MilpInstance& instance) {
    LpProblem lp;
    lp.cost = instance.objective();
    for (const auto& v : instance.variables()) {
        lp.lower.push_back(v.lower);
        lp.upper.push_back(v.upper);
    }
    lp.rows = instance.constraints();
    return lp;
}

}  // namespace rec
