#include "gfrac/operators.hpp"
#include "gfrac/errors.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <vector>

namespace gfrac {

namespace {

Eigen::SparseMatrix<double> identity_sparse(int d, double scale) {
    Eigen::SparseMatrix<double> m(d, d);
    m.setIdentity();
    return m * scale;
}

double lp_norm_weighted(const Eigen::VectorXd& x, double p, double w) {
    double acc = 0.0;
    for (int i = 0; i < x.size(); ++i) acc += std::pow(std::fabs(x[i]), p) * w;
    return std::pow(acc, 1.0 / p);
}

} // namespace

// ---- EigenBasis ------------------------------------------------------------

EigenBasis::EigenBasis(const SpatialGrid& grid, double alpha_frac)
    : grid_(grid), alpha_frac_(alpha_frac) {
    if (grid.dimension != 1 && grid.dimension != 2)
        throw ParamOutOfRange("EigenBasis: dimension must be 1 or 2");
    if (grid.n < 2) throw ParamOutOfRange("EigenBasis: n >= 2 required");
    if (!(alpha_frac > 0.0 && alpha_frac <= 1.0))
        throw ParamOutOfRange("EigenBasis: alpha_frac must lie in (0,1]");
    const int n = grid.n;
    sine_.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            sine_(i, j) = std::sin((i + 1.0) * (j + 1.0) * M_PI / (n + 1.0));
    const double h = grid.h();
    axis_lambda_.resize(n);
    for (int i = 0; i < n; ++i) {
        double s = std::sin((i + 1.0) * M_PI / (2.0 * (n + 1.0)));
        axis_lambda_[i] = 4.0 / (h * h) * s * s;
    }
}

double EigenBasis::eigenvalue(int flat) const {
    const int n = grid_.n;
    if (grid_.dimension == 1) return axis_lambda_[flat];
    return axis_lambda_[flat % n] + axis_lambda_[flat / n];
}

Eigen::VectorXd EigenBasis::to_coeff(const Eigen::VectorXd& x) const {
    const int n = grid_.n;
    const double h = grid_.h();
    if (x.size() != grid_.size()) throw DimensionMismatch("EigenBasis::to_coeff");
    if (grid_.dimension == 1) {
        double c = std::sqrt(2.0 / (h * (n + 1.0)));
        return h * c * (sine_ * x);
    }
    Eigen::Map<const Eigen::MatrixXd> X(x.data(), n, n);
    double c2 = 2.0 / (h * (n + 1.0));
    Eigen::MatrixXd C = h * h * c2 * (sine_ * X * sine_);
    return Eigen::Map<Eigen::VectorXd>(C.data(), n * n);
}

Eigen::VectorXd EigenBasis::from_coeff(const Eigen::VectorXd& c) const {
    const int n = grid_.n;
    const double h = grid_.h();
    if (c.size() != grid_.size()) throw DimensionMismatch("EigenBasis::from_coeff");
    if (grid_.dimension == 1) {
        double cc = std::sqrt(2.0 / (h * (n + 1.0)));
        return cc * (sine_ * c);
    }
    Eigen::Map<const Eigen::MatrixXd> C(c.data(), n, n);
    double c2 = 2.0 / (h * (n + 1.0));
    Eigen::MatrixXd X = c2 * (sine_ * C * sine_);
    return Eigen::Map<Eigen::VectorXd>(X.data(), n * n);
}

Eigen::VectorXd EigenBasis::frac_apply(const Eigen::VectorXd& x, double power) const {
    Eigen::VectorXd c = to_coeff(x);
    for (int i = 0; i < c.size(); ++i) c[i] *= std::pow(eigenvalue(i), power);
    return from_coeff(c);
}

double EigenBasis::h_inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    Eigen::VectorXd cx = to_coeff(x), cy = to_coeff(y);
    double acc = 0.0;
    for (int i = 0; i < cx.size(); ++i)
        acc += std::pow(eigenvalue(i), -alpha_frac_) * cx[i] * cy[i];
    return acc;
}

Eigen::MatrixXd EigenBasis::frac_matrix(double power) const {
    const int d = grid_.size();
    Eigen::MatrixXd M(d, d);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < d; ++j) {
        e[j] = 1.0;
        M.col(j) = frac_apply(e, power);
        e[j] = 0.0;
    }
    return M;
}

double h_inner(const EigenBasis& basis, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size()) throw DimensionMismatch("h_inner: size mismatch");
    return basis.h_inner(x, y);
}

// ---- porous medium / fast diffusion ----------------------------------------

namespace {

OperatorModel medium_operator(const SpatialGrid& grid, double r, double psi_scale,
                              double phi_scale, double frac_power, double eps_reg,
                              bool fast, std::string id) {
    auto basis = std::make_shared<EigenBasis>(grid, frac_power);
    const int d = grid.size();
    const double vol = grid.cell_volume();

    // (-L_h)^{alpha} as a sparse matrix: 3/5-point stencil for alpha = 1,
    // dense spectral matrix otherwise
    Eigen::SparseMatrix<double> Lfrac(d, d);
    if (frac_power == 1.0) {
        const int n = grid.n;
        const double ih2 = 1.0 / (grid.h() * grid.h());
        std::vector<Eigen::Triplet<double>> trip;
        if (grid.dimension == 1) {
            for (int i = 0; i < n; ++i) {
                trip.emplace_back(i, i, 2.0 * ih2);
                if (i > 0) trip.emplace_back(i, i - 1, -ih2);
                if (i < n - 1) trip.emplace_back(i, i + 1, -ih2);
            }
        } else {
            auto at = [n](int ix, int iy) { return ix + n * iy; };
            for (int iy = 0; iy < n; ++iy)
                for (int ix = 0; ix < n; ++ix) {
                    int row = at(ix, iy);
                    trip.emplace_back(row, row, 4.0 * ih2);
                    if (ix > 0) trip.emplace_back(row, at(ix - 1, iy), -ih2);
                    if (ix < n - 1) trip.emplace_back(row, at(ix + 1, iy), -ih2);
                    if (iy > 0) trip.emplace_back(row, at(ix, iy - 1), -ih2);
                    if (iy < n - 1) trip.emplace_back(row, at(ix, iy + 1), -ih2);
                }
        }
        Lfrac.setFromTriplets(trip.begin(), trip.end());
    } else {
        Lfrac = basis->frac_matrix(frac_power).sparseView(1.0, 1e-300);
    }

    const double eps2 = eps_reg * eps_reg;
    auto psi_fun = [=](double s) -> double {
        if (s == 0.0) return 0.0;
        if (fast) return psi_scale * s * std::pow(s * s + eps2, 0.5 * (r - 1.0));
        return psi_scale * s * std::pow(std::fabs(s), r - 1.0);
    };
    auto dpsi_fun = [=](double s) -> double {
        if (fast) {
            double s2 = s * s + eps2;
            if (s2 == 0.0) {
                // degenerate slope at 0 for eps_reg = 0: clamp to the value a
                // hair away from the origin
                return psi_scale * r * std::pow(1e-8, r - 1.0);
            }
            return psi_scale * std::pow(s2, 0.5 * (r - 3.0)) * (r * s * s + eps2);
        }
        if (s == 0.0) return r > 1.0 ? 0.0 : psi_scale;
        return psi_scale * r * std::pow(std::fabs(s), r - 1.0);
    };

    OperatorModel op;
    op.id = std::move(id);
    op.dim = d;
    op.pairing = Pairing::HminusOne;
    op.constants.alpha = r + 1.0;
    op.constants.delta = psi_scale;
    op.constants.C1 = std::max(phi_scale, 0.0);
    op.constants.C2 = std::fabs(phi_scale);
    const std::string opid = op.id;
    op.apply = [=](double, const Eigen::VectorXd& u) -> Eigen::VectorXd {
        if (u.size() != d) throw DimensionMismatch(opid + ": state size");
        Eigen::VectorXd w(d);
        for (int i = 0; i < d; ++i) w[i] = psi_fun(u[i]);
        Eigen::VectorXd out = Lfrac * w;
        if (phi_scale != 0.0) out -= phi_scale * u;
        return out;
    };
    op.jacobian = [=](double, const Eigen::VectorXd& u) {
        Eigen::VectorXd dw(d);
        for (int i = 0; i < d; ++i) dw[i] = dpsi_fun(u[i]);
        Eigen::SparseMatrix<double> J = Lfrac * Eigen::SparseMatrix<double>(dw.asDiagonal());
        if (phi_scale != 0.0) J = J - identity_sparse(d, phi_scale);
        return J;
    };
    op.inner_h = [basis](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return basis->h_inner(x, y);
    };
    op.norm_v = [=](const Eigen::VectorXd& u) { return lp_norm_weighted(u, r + 1.0, vol); };
    op.dual_norm_bound = [=](double, const Eigen::VectorXd& u) {
        Eigen::VectorXd w(d);
        for (int i = 0; i < d; ++i) w[i] = psi_fun(u[i]);
        double q = (r + 1.0) / r;
        double lam1 = basis->eigenvalue(0);
        Eigen::VectorXd cu = basis->to_coeff(u);
        double hn = 0.0;
        for (int i = 0; i < cu.size(); ++i)
            hn += std::pow(basis->eigenvalue(i), -frac_power) * cu[i] * cu[i];
        return lp_norm_weighted(w, q, vol) +
               std::fabs(phi_scale) * std::sqrt(hn) * std::pow(lam1, -0.5 * frac_power);
    };
    op.forcing_bound = [](double) { return 0.0; };
    return op;
}

} // namespace

OperatorModel porous_medium_operator(const SpatialGrid& grid, double r, double psi_scale,
                                     double phi_scale, double frac_power) {
    if (r < 1.0)
        throw BadExponent("porous_medium_operator: r < 1 is the fast-diffusion range, "
                          "use fast_diffusion_operator");
    if (psi_scale <= 0.0) throw ParamOutOfRange("porous_medium_operator: psi_scale > 0 required");
    return medium_operator(grid, r, psi_scale, phi_scale, frac_power, 0.0, false,
                           "porous_medium(r=" + std::to_string(r) + ")");
}

OperatorModel fast_diffusion_operator(const SpatialGrid& grid, double r, double psi_scale,
                                      double eps_reg, double frac_power) {
    if (!(r > 0.0 && r < 1.0))
        throw BadExponent("fast_diffusion_operator: requires 0 < r < 1");
    if (psi_scale <= 0.0) throw ParamOutOfRange("fast_diffusion_operator: psi_scale > 0 required");
    if (eps_reg < 0.0) throw ParamOutOfRange("fast_diffusion_operator: eps_reg >= 0 required");
    return medium_operator(grid, r, psi_scale, 0.0, frac_power, eps_reg, true,
                           "fast_diffusion(r=" + std::to_string(r) + ")");
}

// ---- p-Laplace --------------------------------------------------------------

OperatorModel p_laplace_operator(const SpatialGrid& grid, double p, Reaction reaction,
                                 double eps_reg) {
    if (p < 2.0) throw ParamOutOfRange("p_laplace_operator: requires p >= 2");
    if (eps_reg < 0.0) throw ParamOutOfRange("p_laplace_operator: eps_reg >= 0 required");
    if (grid.dimension != 1 && grid.dimension != 2)
        throw ParamOutOfRange("p_laplace_operator: dimension must be 1 or 2");
    if (grid.n < 2) throw ParamOutOfRange("p_laplace_operator: n >= 2 required");
    const int d = grid.size();
    const int n = grid.n;
    const double h = grid.h();
    const double vol = grid.cell_volume();
    const int dim = grid.dimension;

    // Gradient operator G: nodal values -> per-face gradient vectors (the
    // normal difference plus, in 2D, the 4-point averaged tangential
    // component). A(u) = G^T W(G u) makes nodal monotonicity structural.
    std::vector<Eigen::Triplet<double>> trip;
    int rows = 0;
    auto add = [&](int r2, int c, double v) { trip.emplace_back(r2, c, v); };
    if (dim == 1) {
        for (int f = 0; f <= n; ++f) {
            if (f < n) add(rows, f, 1.0 / h);
            if (f > 0) add(rows, f - 1, -1.0 / h);
            ++rows;
        }
    } else {
        auto at = [n](int ix, int iy) { return ix + n * iy; };
        auto tangent = [&](int r2, int ix, int iy, bool xdir) {
            // averaged difference in the orthogonal direction at node (ix,iy)
            if (xdir) {
                if (iy + 1 < n) add(r2, at(ix, iy + 1), 1.0 / (4.0 * h));
                if (iy - 1 >= 0) add(r2, at(ix, iy - 1), -1.0 / (4.0 * h));
            } else {
                if (ix + 1 < n) add(r2, at(ix + 1, iy), 1.0 / (4.0 * h));
                if (ix - 1 >= 0) add(r2, at(ix - 1, iy), -1.0 / (4.0 * h));
            }
        };
        // x-faces
        for (int iy = 0; iy < n; ++iy)
            for (int fx = 0; fx <= n; ++fx) {
                int rg = rows, rt = rows + 1;
                if (fx < n) add(rg, at(fx, iy), 1.0 / h);
                if (fx > 0) add(rg, at(fx - 1, iy), -1.0 / h);
                if (fx < n) tangent(rt, fx, iy, true);
                if (fx > 0) tangent(rt, fx - 1, iy, true);
                rows += 2;
            }
        // y-faces
        for (int ix = 0; ix < n; ++ix)
            for (int fy = 0; fy <= n; ++fy) {
                int rg = rows, rt = rows + 1;
                if (fy < n) add(rg, at(ix, fy), 1.0 / h);
                if (fy > 0) add(rg, at(ix, fy - 1), -1.0 / h);
                if (fy < n) tangent(rt, ix, fy, false);
                if (fy > 0) tangent(rt, ix, fy - 1, false);
                rows += 2;
            }
    }
    auto G = std::make_shared<Eigen::SparseMatrix<double>>(rows, d);
    G->setFromTriplets(trip.begin(), trip.end());
    auto Gt = std::make_shared<Eigen::SparseMatrix<double>>(G->transpose());

    const double eps2 = eps_reg * eps_reg;
    const int comp = dim; // components per face
    const int nfaces = rows / comp;
    bool has_reaction = static_cast<bool>(reaction.f);

    OperatorModel op;
    op.id = "p_laplace(p=" + std::to_string(p) + ")";
    op.dim = d;
    op.pairing = Pairing::L2Nodal;
    op.constants.alpha = p;
    op.constants.delta = 1.0;
    op.constants.C1 = reaction.lipschitz;
    op.constants.C2 = reaction.lipschitz;
    const std::string opid = op.id;
    op.apply = [=](double t, const Eigen::VectorXd& u) -> Eigen::VectorXd {
        if (u.size() != d) throw DimensionMismatch(opid + ": state size");
        Eigen::VectorXd g = (*G) * u;
        Eigen::VectorXd flux(g.size());
        for (int f = 0; f < nfaces; ++f) {
            double s2 = eps2;
            for (int c = 0; c < comp; ++c) s2 += g[comp * f + c] * g[comp * f + c];
            double w = (s2 == 0.0) ? (p == 2.0 ? 1.0 : 0.0) : std::pow(s2, 0.5 * (p - 2.0));
            for (int c = 0; c < comp; ++c) flux[comp * f + c] = w * g[comp * f + c];
        }
        Eigen::VectorXd out = (*Gt) * flux;
        if (has_reaction)
            for (int i = 0; i < d; ++i) out[i] -= reaction.f(t, u[i]);
        return out;
    };
    op.jacobian = [=](double t, const Eigen::VectorXd& u) {
        Eigen::VectorXd g = (*G) * u;
        std::vector<Eigen::Triplet<double>> dt;
        dt.reserve(static_cast<std::size_t>(nfaces) * comp * comp);
        for (int f = 0; f < nfaces; ++f) {
            double s2 = eps2;
            for (int c = 0; c < comp; ++c) s2 += g[comp * f + c] * g[comp * f + c];
            double w = (s2 == 0.0) ? (p == 2.0 ? 1.0 : 0.0) : std::pow(s2, 0.5 * (p - 2.0));
            double cd = (s2 == 0.0) ? 0.0 : (p - 2.0) * w / s2;
            for (int a = 0; a < comp; ++a)
                for (int b = 0; b < comp; ++b) {
                    double v = cd * g[comp * f + a] * g[comp * f + b] + (a == b ? w : 0.0);
                    if (v != 0.0) dt.emplace_back(comp * f + a, comp * f + b, v);
                }
        }
        Eigen::SparseMatrix<double> D(comp * nfaces, comp * nfaces);
        D.setFromTriplets(dt.begin(), dt.end());
        Eigen::SparseMatrix<double> J = (*Gt) * D * (*G);
        if (has_reaction) {
            Eigen::VectorXd dr(d);
            for (int i = 0; i < d; ++i) dr[i] = reaction.dfds ? reaction.dfds(t, u[i]) : 0.0;
            J = J - Eigen::SparseMatrix<double>(dr.asDiagonal());
        }
        return J;
    };
    op.inner_h = [vol](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return vol * x.dot(y);
    };
    op.norm_v = [=](const Eigen::VectorXd& u) {
        Eigen::VectorXd g = (*G) * u;
        double acc = 0.0;
        for (int f = 0; f < nfaces; ++f) {
            double s2 = 0.0;
            for (int c = 0; c < comp; ++c) s2 += g[comp * f + c] * g[comp * f + c];
            acc += std::pow(s2, 0.5 * p) * vol;
        }
        return std::pow(acc, 1.0 / p);
    };
    op.dual_norm_bound = [=](double t, const Eigen::VectorXd& u) {
        Eigen::VectorXd g = (*G) * u;
        double q = p / (p - 1.0);
        double acc = 0.0;
        for (int f = 0; f < nfaces; ++f) {
            double s2 = eps2;
            for (int c = 0; c < comp; ++c) s2 += g[comp * f + c] * g[comp * f + c];
            double w = (s2 == 0.0) ? 0.0 : std::pow(s2, 0.5 * (p - 2.0));
            acc += std::pow(w * std::sqrt(s2), q) * vol;
        }
        double bound = std::pow(acc, 1.0 / q);
        if (has_reaction) {
            double racc = 0.0;
            for (int i = 0; i < d; ++i) racc += std::pow(std::fabs(reaction.f(t, u[i])), q) * vol;
            bound += std::pow(racc, 1.0 / q);
        }
        return bound;
    };
    op.forcing_bound = [](double) { return 0.0; };
    return op;
}

// ---- scalar operators --------------------------------------------------------

OperatorModel scalar_operator(std::function<double(double, double)> a,
                              std::function<double(double, double)> da_du,
                              HConstants constants, std::string id) {
    OperatorModel op;
    op.id = std::move(id);
    op.dim = 1;
    op.pairing = Pairing::L2Nodal;
    op.constants = constants;
    op.apply = [a](double t, const Eigen::VectorXd& u) {
        Eigen::VectorXd out(1);
        out[0] = a(t, u[0]);
        return out;
    };
    op.jacobian = [da_du](double t, const Eigen::VectorXd& u) {
        Eigen::SparseMatrix<double> J(1, 1);
        J.insert(0, 0) = da_du(t, u[0]);
        return J;
    };
    op.inner_h = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return x.dot(y); };
    op.norm_v = [](const Eigen::VectorXd& u) { return std::fabs(u[0]); };
    auto av = op.apply;
    op.dual_norm_bound = [av](double t, const Eigen::VectorXd& u) {
        return std::fabs(av(t, u)[0]);
    };
    op.forcing_bound = [](double) { return 0.0; };
    return op;
}

OperatorModel relaxation_operator(double lambda) {
    if (lambda <= 0.0) throw ParamOutOfRange("relaxation_operator: lambda > 0 required");
    return scalar_operator([lambda](double, double u) { return lambda * u; },
                           [lambda](double, double) { return lambda; },
                           {2.0, lambda, 0.0, 0.0},
                           "relaxation(lambda=" + std::to_string(lambda) + ")");
}

OperatorModel scalar_cubic_operator(double c1) {
    if (c1 < 0.0) throw ParamOutOfRange("scalar_cubic_operator: c1 >= 0 required");
    return scalar_operator([c1](double, double u) { return u * u * u - c1 * u; },
                           [c1](double, double u) { return 3.0 * u * u - c1; },
                           {4.0, 1.0, c1, c1},
                           "scalar_cubic(c1=" + std::to_string(c1) + ")");
}

// ---- (H1)-(H4) validator ------------------------------------------------------

HConditionReport validate_H_conditions(const OperatorModel& op, int samples, double tol,
                                       std::uint64_t seed) {
    if (samples < 100)
        throw ParamOutOfRange("validate_H_conditions: sample count >= 100 required");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    // log-uniform magnitudes probe the degenerate small-amplitude region too
    std::uniform_real_distribution<double> logmag(std::log(1e-2), std::log(3.0));
    auto mag = [&](auto& g) { return std::exp(logmag(g)); };
    auto rand_vec = [&](double scale) {
        Eigen::VectorXd v(op.dim);
        for (int i = 0; i < op.dim; ++i) v[i] = scale * uni(rng);
        return v;
    };
    const double tprobe[3] = {0.0, 0.3, 1.0};
    HConditionReport rep;

    // (H1) continuity of s -> <A(t, v1 + s v2), v> along refining s-grids
    {
        double worst_ratio = 0.0, worst_mod = 0.0;
        for (int trial = 0; trial < 8; ++trial) {
            Eigen::VectorXd v1 = rand_vec(1.0), v2 = rand_vec(1.0), v = rand_vec(1.0);
            double t = tprobe[trial % 3];
            auto phi = [&](double s) {
                return op.inner_h(op.apply(t, v1 + s * v2), v);
            };
            double mod0 = 0.0, modk = 0.0;
            for (int level = 0; level <= 3; ++level) {
                double ds = 0.25 / (1 << level);
                double m = 0.0;
                for (double s = -1.0; s < 1.0 - 0.5 * ds; s += ds)
                    m = std::max(m, std::fabs(phi(s + ds) - phi(s)));
                if (level == 0) mod0 = m;
                modk = m;
            }
            double scale = std::max(1e-14, mod0);
            worst_ratio = std::max(worst_ratio, modk / scale);
            worst_mod = std::max(worst_mod, modk);
        }
        rep.h1_final_modulus = worst_mod;
        rep.h1_pass = worst_ratio <= 0.7 || worst_mod <= 1e-9;
    }

    // (H2) weak monotonicity in the declared pairing
    {
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 0; i < samples; ++i) {
            Eigen::VectorXd x = rand_vec(mag(rng)), y = rand_vec(mag(rng));
            double t = tprobe[i % 3];
            Eigen::VectorXd dx = x - y;
            double den = op.inner_h(dx, dx);
            if (den < 1e-14) continue;
            double num = op.inner_h(op.apply(t, x) - op.apply(t, y), dx);
            worst = std::min(worst, num / den);
        }
        rep.h2_worst_quotient = worst;
        rep.h2_pass = worst >= -op.constants.C1 * (1.0 + 1e-6) - tol;
    }

    // (H3) coercivity: (<A v, v> + C2 |v|_H^2 + g(t)) / |v|_V^alpha > 0
    {
        double dmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < samples; ++i) {
            Eigen::VectorXd v = rand_vec(mag(rng));
            double t = tprobe[i % 3];
            double nv = op.norm_v(v);
            if (nv < 1e-12) continue;
            double val = op.inner_h(op.apply(t, v), v) +
                         op.constants.C2 * op.inner_h(v, v) + op.forcing_bound(t);
            dmin = std::min(dmin, val / std::pow(nv, op.constants.alpha));
        }
        rep.h3_delta_emp = dmin;
        rep.h3_pass = dmin > 0.0;
    }

    // (H4) growth: report the measured constant sup |A|_{V*}^{a/(a-1)} / (g + |v|_V^a + |v|_H^2)
    {
        double cmax = 0.0;
        double q = op.constants.alpha / (op.constants.alpha - 1.0);
        for (int i = 0; i < samples; ++i) {
            Eigen::VectorXd v = rand_vec(mag(rng));
            double t = tprobe[i % 3];
            double num = std::pow(op.dual_norm_bound(t, v), q);
            double den = op.forcing_bound(t) + std::pow(op.norm_v(v), op.constants.alpha) +
                         op.inner_h(v, v);
            if (den < 1e-14) continue;
            cmax = std::max(cmax, num / den);
        }
        rep.h4_constant = cmax;
        rep.h4_pass = std::isfinite(cmax);
    }
    return rep;
}

} // namespace gfrac
