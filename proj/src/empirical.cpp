#include "lrdseq/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrdseq/errors.hpp"
#include "lrdseq/hermite.hpp"
#include "lrdseq/io.hpp"

namespace lrdseq {

DistributionTable distribution_table(const Subordinator& G, const EvaluationGrid& grid,
                                     const QuadSpec& quad) {
    DistributionTable out;
    const std::size_t lattice = grid.lattice_size();
    out.F.resize(lattice);

    QuadSpec effective = quad;
    const bool monte_carlo = !G.separable() && G.p > 3;
    // centering needs the true F, not the empirical one; the sampling
    // fallback runs at 10^6 points and its standard error is recorded
    if (monte_carlo) effective.qmc_points = std::max(quad.qmc_points, 1000000);

    double worst_err = 0.0;
    for (std::size_t flat = 0; flat < lattice; ++flat) {
        const auto res = distribution_value(G, grid.point_at(flat), effective);
        out.F[flat] = res.value;
        worst_err = std::max(worst_err, res.error);
    }
    if (monte_carlo) {
        out.source = DistributionTable::Source::monte_carlo;
        out.mc_standard_error = worst_err;
    }
    return out;
}

namespace {

// floor(N t) with a sub-ulp-scale nudge so decimal t values that are not
// exactly representable (0.3, 0.7, ...) land on the intended integer.
long floor_nt(long N, double t) {
    return static_cast<long>(std::floor(static_cast<double>(N) * t + 1e-9));
}

// First grid index whose point dominates y; ties count (closed lower
// quadrant, exact comparison on representable values).
std::size_t first_dominating(const std::vector<double>& xs, double y) {
    return static_cast<std::size_t>(
        std::lower_bound(xs.begin(), xs.end(), y) - xs.begin());
}

// Incremental lattice counter: add one observation, bump every lattice
// point dominating it. Lattices here are small (10^2..10^4 points).
class LatticeCounter {
public:
    explicit LatticeCounter(const EvaluationGrid& grid) : grid_(grid) {
        dims_ = grid.dims();
        sizes_.resize(dims_);
        for (int d = 0; d < dims_; ++d) sizes_[d] = grid.x_points[d].size();
        counts_.assign(grid.lattice_size(), 0);
    }

    void add(const Eigen::MatrixXd& Y, long row) {
        std::vector<std::size_t> start(dims_);
        for (int d = 0; d < dims_; ++d) {
            const std::size_t ui = first_dominating(grid_.x_points[d], Y(row, d));
            if (ui >= sizes_[d]) return; // cannot happen: +inf sentinel dominates
            start[d] = ui;
        }
        bump(0, 0, start);
    }

    const std::vector<long>& counts() const { return counts_; }

private:
    void bump(int d, std::size_t base, const std::vector<std::size_t>& start) {
        if (d == dims_) {
            ++counts_[base];
            return;
        }
        for (std::size_t i = start[d]; i < sizes_[d]; ++i)
            bump(d + 1, base * sizes_[d] + i, start);
    }

    const EvaluationGrid& grid_;
    int dims_ = 0;
    std::vector<std::size_t> sizes_;
    std::vector<long> counts_;
};

} // namespace

SeqEmpiricalSurface sequential_empirical(const Eigen::MatrixXd& Y,
                                         const EvaluationGrid& grid,
                                         const DistributionTable& F) {
    grid.validate();
    if (static_cast<int>(Y.cols()) != grid.dims())
        throw GridMismatch("sequential_empirical: sample dimension != grid dimension");
    if (F.F.size() != grid.lattice_size())
        throw GridMismatch("sequential_empirical: F table size != lattice size");

    const long N = Y.rows();
    SeqEmpiricalSurface surf;
    surf.grid = grid;
    surf.N = N;
    surf.f_source = F.source;
    surf.f_mc_standard_error = F.mc_standard_error;

    LatticeCounter counter(grid);
    const std::size_t lattice = grid.lattice_size();
    long next_row = 0;
    for (double t : grid.t_points) {
        const long nt = std::min(floor_nt(N, t), N);
        while (next_row < nt) {
            counter.add(Y, next_row);
            ++next_row;
        }
        std::vector<double> slice(lattice);
        for (std::size_t i = 0; i < lattice; ++i)
            slice[i] = static_cast<double>(counter.counts()[i]) -
                       static_cast<double>(nt) * F.F[i];
        surf.counts.push_back(counter.counts());
        surf.values.push_back(std::move(slice));
    }
    return surf;
}

std::string surface_csv(const SeqEmpiricalSurface& surface) {
    std::vector<std::string> header{"t"};
    for (int d = 1; d <= surface.grid.dims(); ++d) header.push_back("x" + std::to_string(d));
    header.push_back("value");
    CsvWriter csv(std::move(header));
    const std::size_t lattice = surface.grid.lattice_size();
    for (std::size_t ti = 0; ti < surface.grid.t_points.size(); ++ti) {
        for (std::size_t flat = 0; flat < lattice; ++flat) {
            std::vector<std::string> row{format_double(surface.grid.t_points[ti])};
            for (double v : surface.grid.point_at(flat)) row.push_back(format_double(v));
            row.push_back(format_double(surface.values[ti][flat]));
            csv.add_row(std::move(row));
        }
    }
    return csv.str();
}

double normalization(const std::function<double(long)>& r, int m, long N) {
    if (m < 1) throw OrderTooLarge("normalization: rank must be >= 1");
    if (N < 1) throw IndexOutOfRange("normalization: N must be >= 1");
    double acc = static_cast<double>(N);
    for (long k = 1; k < N; ++k) {
        const double rk = r(k);
        if (std::abs(rk) > 1.0 + 1e-12)
            throw IndexOutOfRange("normalization: |r(k)| must be <= 1 at lag " +
                                  std::to_string(k));
        acc += 2.0 * static_cast<double>(N - k) * std::pow(rk, m);
    }
    const double d2 = factorial(m) * acc;
    return std::sqrt(std::max(d2, 0.0));
}

LeadingTermSpec make_leading_spec(const HermiteCoeffTable& table, int m) {
    LeadingTermSpec spec;
    spec.m = m;
    spec.indices = multi_indices_of_order(table.p, m);
    const std::size_t lattice = table.grid.lattice_size();
    spec.factors.resize(lattice);
    for (std::size_t flat = 0; flat < lattice; ++flat) {
        spec.factors[flat].reserve(spec.indices.size());
        for (const auto& idx : spec.indices) {
            const auto pos = table.index_position(idx);
            if (!pos)
                throw MissingCoefficient(
                    "make_leading_spec: table lacks an order-" + std::to_string(m) +
                    " multi-index; rebuild with max_order >= " + std::to_string(m));
            spec.factors[flat].push_back(table.coeffs[flat][*pos].value /
                                         multi_factorial(idx));
        }
    }
    return spec;
}

namespace {

// prefix sums of H_l(X_j) for each multi-index
std::vector<double> hermite_increments(const Eigen::MatrixXd& X,
                                       const std::vector<std::vector<int>>& indices,
                                       long row) {
    std::vector<double> out(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        double prod = 1.0;
        for (std::size_t d = 0; d < indices[i].size(); ++d)
            prod *= hermite(indices[i][d], X(row, static_cast<long>(d)));
        out[i] = prod;
    }
    return out;
}

} // namespace

std::vector<std::vector<double>> leading_term_surface(const Eigen::MatrixXd& X,
                                                      const LeadingTermSpec& spec,
                                                      const EvaluationGrid& grid,
                                                      double d_N) {
    const long N = X.rows();
    const std::size_t lattice = grid.lattice_size();
    const std::size_t nidx = spec.indices.size();

    std::vector<std::vector<double>> out;
    std::vector<double> hsum(nidx, 0.0);
    long next_row = 0;
    for (double t : grid.t_points) {
        const long nt = std::min(floor_nt(N, t), N);
        while (next_row < nt) {
            const auto inc = hermite_increments(X, spec.indices, next_row);
            for (std::size_t i = 0; i < nidx; ++i) hsum[i] += inc[i];
            ++next_row;
        }
        std::vector<double> slice(lattice, 0.0);
        for (std::size_t flat = 0; flat < lattice; ++flat) {
            double v = 0.0;
            for (std::size_t i = 0; i < nidx; ++i) v += spec.factors[flat][i] * hsum[i];
            slice[flat] = v / d_N;
        }
        out.push_back(std::move(slice));
    }
    return out;
}

ReductionResult reduction_statistic(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                    const LeadingTermSpec& spec,
                                    const EvaluationGrid& grid,
                                    const DistributionTable& F, double d_N) {
    grid.validate();
    if (X.rows() != Y.rows())
        throw GridMismatch("reduction_statistic: X and Y lengths differ");
    if (static_cast<int>(Y.cols()) != grid.dims())
        throw GridMismatch("reduction_statistic: sample dimension != grid dimension");
    if (F.F.size() != grid.lattice_size())
        throw GridMismatch("reduction_statistic: F table size != lattice size");

    const long N = X.rows();
    const std::size_t lattice = grid.lattice_size();
    const std::size_t nidx = spec.indices.size();

    ReductionResult out;
    out.per_n_sup.resize(static_cast<std::size_t>(N));

    LatticeCounter counter(grid);
    std::vector<double> hsum(nidx, 0.0);
    for (long n = 1; n <= N; ++n) {
        counter.add(Y, n - 1);
        const auto inc = hermite_increments(X, spec.indices, n - 1);
        for (std::size_t i = 0; i < nidx; ++i) hsum[i] += inc[i];

        double sup = 0.0;
        const auto& counts = counter.counts();
        for (std::size_t flat = 0; flat < lattice; ++flat) {
            double lead = 0.0;
            for (std::size_t i = 0; i < nidx; ++i)
                lead += spec.factors[flat][i] * hsum[i];
            const double v = static_cast<double>(counts[flat]) -
                             static_cast<double>(n) * F.F[flat] - lead;
            sup = std::max(sup, std::abs(v));
        }
        sup /= d_N;
        out.per_n_sup[static_cast<std::size_t>(n - 1)] = sup;
        if (sup > out.max_stat) {
            out.max_stat = sup;
            out.argmax_n = n;
        }
    }
    return out;
}

} // namespace lrdseq
