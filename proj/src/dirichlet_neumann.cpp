#include "ulwaves/dirichlet_neumann.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace ulwaves {

namespace {

struct ModeFactors {
    RealField c0, c1, c2;
};

// Spectral factors of rho, d_z rho, d_z^2 rho with respect to eta_hat at height z.
ModeFactors mode_factors(const PeriodicGrid& g, double z, double delta, BottomMode bottom)
{
    const RealField b = japanese_bracket(g);
    const RealField db = delta * b;
    const RealField E = (delta * z * b).exp();
    ModeFactors f;
    f.c0 = (1.0 + z) * E;
    f.c1 = E + (1.0 + z) * db * E;
    f.c2 = 2.0 * db * E + (1.0 + z) * db.square() * E;
    if (bottom == BottomMode::following) {
        const RealField F = (-delta * (1.0 + z) * b).exp();
        f.c0 -= z * F;
        f.c1 += -F + z * db * F;
        f.c2 += 2.0 * db * F - z * db.square() * F;
    }
    return f;
}

ComplexField times_ik(const PeriodicGrid& g, const ComplexField& uh, int axis)
{
    ComplexField out(uh.size());
    const RealField& k = g.wavenumber(axis);
    for (Eigen::Index f = 0; f < uh.size(); ++f)
        out(f) = g.is_nyquist(axis, f) ? Complex(0.0) : Complex(0.0, k(f)) * uh(f);
    return out;
}

}  // namespace

double straightening_floor(const RealField& eta, double h, BottomMode bottom)
{
    if (bottom == BottomMode::following) return 0.5 * h;
    return 0.5 * std::min(h, h + eta.minCoeff());
}

StraightenedDomain straighten(const PeriodicGrid& grid, const RealField& eta, double h, double delta, int zpoints,
                              BottomMode bottom)
{
    check_size(grid, eta.size(), "straighten");
    if (!(h > 0.0)) throw std::invalid_argument("straighten: depth must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("straighten: delta must be positive");
    StraightenedDomain d{grid};
    d.zpoints = zpoints;
    d.h = h;
    d.delta = delta;
    d.bottom = bottom;
    d.column = chebyshev_column(zpoints);
    const Eigen::Index n = grid.size();
    const int nzp = zpoints + 1;
    const int dims = grid.dims();
    d.rho.resize(n, nzp);
    d.rho_z.resize(n, nzp);
    d.rho_zz.resize(n, nzp);
    d.lap_rho.resize(n, nzp);
    d.grad_rho.assign(dims, PlaneField(n, nzp));
    d.grad_rho_z.assign(dims, PlaneField(n, nzp));
    FourierTransform ft(grid);
    const ComplexField eh = ft.forward(eta);
    const RealField k2 = grid.wavenumber_norm().square();
    for (int j = 0; j < nzp; ++j) {
        const double z = d.column.z(j);
        const ModeFactors f = mode_factors(grid, z, delta, bottom);
        const ComplexField r0 = eh * f.c0.cast<Complex>();
        const ComplexField r1 = eh * f.c1.cast<Complex>();
        const ComplexField r2 = eh * f.c2.cast<Complex>();
        d.rho.col(j) = (ft.inverse_real(r0) + h * z).matrix();
        d.rho_z.col(j) = (ft.inverse_real(r1) + h).matrix();
        d.rho_zz.col(j) = ft.inverse_real(r2).matrix();
        d.lap_rho.col(j) = ft.inverse_real(ComplexField(-k2.cast<Complex>() * r0)).matrix();
        for (int a = 0; a < dims; ++a) {
            d.grad_rho[a].col(j) = ft.inverse_real(times_ik(grid, r0, a)).matrix();
            d.grad_rho_z[a].col(j) = ft.inverse_real(times_ik(grid, r1, a)).matrix();
        }
    }
    const double mn = d.rho_z.minCoeff();
    const double floor = straightening_floor(eta, h, bottom);
    if (!(mn >= floor)) {
        std::ostringstream os;
        os << "straightening failed: min d_z rho = " << mn << " < " << floor << " at delta = " << delta;
        throw StraighteningFailure(os.str(), mn, delta);
    }
    PlaneField q = PlaneField::Ones(n, nzp);
    for (int a = 0; a < dims; ++a) q.array() += d.grad_rho[a].array().square();
    d.alpha = (d.rho_z.array().square() / q.array()).matrix();
    d.beta.assign(dims, PlaneField(n, nzp));
    PlaneField num = d.rho_zz + (d.alpha.array() * d.lap_rho.array()).matrix();
    for (int a = 0; a < dims; ++a) {
        d.beta[a] = (-2.0 * d.rho_z.array() * d.grad_rho[a].array() / q.array()).matrix();
        num.array() += d.beta[a].array() * d.grad_rho_z[a].array();
    }
    d.gamma = (num.array() / d.rho_z.array()).matrix();
    d.g1 = (q.array() / d.rho_z.array()).matrix();
    return d;
}

StraightenedDomain straighten(const PeriodicGrid& grid, const RealField& eta, const DnoParams& p)
{
    double delta = p.delta;
    for (int attempt = 0;; ++attempt) {
        try {
            return straighten(grid, eta, p.h, delta, p.zpoints, p.bottom);
        } catch (const StraighteningFailure&) {
            if (attempt >= p.max_delta_halvings) throw;
            delta *= 0.5;
        }
    }
}

LaplaceSolver::LaplaceSolver(StraightenedDomain dom, const DnoParams& params)
    : dom_(std::move(dom)), params_(params), ft_(dom_.grid), n_(static_cast<int>(dom_.grid.size())), nz_(dom_.zpoints)
{
    const PeriodicGrid& g = dom_.grid;
    const auto& D = dom_.column.D;
    const auto& D2 = dom_.column.D2;
    const Eigen::VectorXd abar = dom_.alpha.colwise().mean().transpose();
    const Eigen::VectorXd gbar = dom_.gamma.colwise().mean().transpose();
    const double g1bar = dom_.g1.col(nz_).mean();

    std::map<std::pair<int, int>, int> key_to_group;
    group_of_mode_.resize(n_);
    for (Eigen::Index f = 0; f < n_; ++f) {
        const std::pair<int, int> key{std::abs(g.mode(0, f)), g.dims() == 2 ? std::abs(g.mode(1, f)) : 0};
        auto it = key_to_group.find(key);
        if (it == key_to_group.end()) {
            it = key_to_group.emplace(key, static_cast<int>(group_modes_.size())).first;
            group_modes_.emplace_back();
            const double k2 = g.wavenumber_norm()(f) * g.wavenumber_norm()(f);
            Eigen::MatrixXd M(nz_, nz_);
            for (int r = 1; r < nz_; ++r) {
                M.row(r - 1) = D2.row(r).tail(nz_) - gbar(r) * D.row(r).tail(nz_);
                M(r - 1, r - 1) -= abar(r) * k2;
            }
            M.row(nz_ - 1) = g1bar * D.row(nz_).tail(nz_);
            lu_.emplace_back(M);
        }
        group_of_mode_[f] = it->second;
        group_modes_[it->second].push_back(f);
    }
}

PlaneField LaplaceSolver::dz(const PlaneField& phi) const { return phi * dom_.column.D.transpose(); }

void LaplaceSolver::plane_spectral(const PlaneField& X, const PlaneField& Xz, PlaneField& lapX,
                                   std::vector<PlaneField>& gradX, std::vector<PlaneField>& gradXz)
{
    const PeriodicGrid& g = dom_.grid;
    const int dims = g.dims();
    const Eigen::Index cols = X.cols();
    lapX.resize(n_, cols);
    gradX.assign(dims, PlaneField(n_, cols));
    gradXz.assign(dims, PlaneField(n_, cols));
    const ComplexField mk2 = (-g.wavenumber_norm().square()).cast<Complex>();
    ComplexField xh, xzh;
    RealField a, b;
    for (Eigen::Index j = 0; j < cols; ++j) {
        ft_.forward_pair(X.col(j).array(), Xz.col(j).array(), xh, xzh);
        std::vector<ComplexField> spec;
        spec.push_back(xh * mk2);
        for (int ax = 0; ax < dims; ++ax) spec.push_back(times_ik(g, xh, ax));
        for (int ax = 0; ax < dims; ++ax) spec.push_back(times_ik(g, xzh, ax));
        std::vector<RealField> phys(spec.size());
        for (std::size_t i = 0; i < spec.size(); i += 2) {
            if (i + 1 < spec.size()) {
                ft_.inverse_pair(spec[i], spec[i + 1], phys[i], phys[i + 1]);
            } else {
                phys[i] = ft_.inverse_real(spec[i]);
            }
        }
        lapX.col(j) = phys[0].matrix();
        for (int ax = 0; ax < dims; ++ax) {
            gradX[ax].col(j) = phys[1 + ax].matrix();
            gradXz[ax].col(j) = phys[1 + dims + ax].matrix();
        }
    }
}

PlaneField LaplaceSolver::apply_operator(const PlaneField& phi)
{
    const PlaneField phz = dz(phi);
    const PlaneField phzz = phi * dom_.column.D2.transpose();
    PlaneField lap;
    std::vector<PlaneField> gx, gxz;
    plane_spectral(phi, phz, lap, gx, gxz);
    PlaneField out = phzz + (dom_.alpha.array() * lap.array() - dom_.gamma.array() * phz.array()).matrix();
    for (std::size_t a = 0; a < gx.size(); ++a) out.array() += dom_.beta[a].array() * gxz[a].array();
    return out;
}

void LaplaceSolver::matvec(const Eigen::VectorXd& u, Eigen::VectorXd& out)
{
    PlaneField X = PlaneField::Zero(n_, nz_ + 1);
    X.rightCols(nz_) = Eigen::Map<const PlaneField>(u.data(), n_, nz_);
    const PlaneField Xz = dz(X);
    const PlaneField Xzz = X * dom_.column.D2.transpose();
    PlaneField lap;
    std::vector<PlaneField> gx, gxz;
    const PlaneField Xi = X.rightCols(nz_);
    const PlaneField Xzi = Xz.rightCols(nz_);
    plane_spectral(Xi, Xzi, lap, gx, gxz);
    out.resize(static_cast<Eigen::Index>(n_) * nz_);
    Eigen::Map<PlaneField> O(out.data(), n_, nz_);
    for (int r = 1; r < nz_; ++r) {
        auto col = O.col(r - 1).array();
        col = Xzz.col(r).array() + dom_.alpha.col(r).array() * lap.col(r - 1).array() - dom_.gamma.col(r).array() * Xz.col(r).array();
        for (std::size_t a = 0; a < gx.size(); ++a) col += dom_.beta[a].col(r).array() * gxz[a].col(r - 1).array();
    }
    auto bot = O.col(nz_ - 1).array();
    bot = dom_.g1.col(nz_).array() * Xz.col(nz_).array();
    for (std::size_t a = 0; a < gx.size(); ++a) bot -= dom_.grad_rho[a].col(nz_).array() * gx[a].col(nz_ - 1).array();
}

void LaplaceSolver::precondition(const Eigen::VectorXd& r, Eigen::VectorXd& out)
{
    Eigen::Map<const PlaneField> R(r.data(), n_, nz_);
    Eigen::MatrixXcd H(n_, nz_);
    ComplexField a, b;
    for (int j = 0; j < nz_; j += 2) {
        if (j + 1 < nz_) {
            ft_.forward_pair(R.col(j).array(), R.col(j + 1).array(), a, b);
            H.col(j) = a.matrix();
            H.col(j + 1) = b.matrix();
        } else {
            H.col(j) = ft_.forward(RealField(R.col(j).array())).matrix();
        }
    }
    for (std::size_t grp = 0; grp < group_modes_.size(); ++grp) {
        const auto& modes = group_modes_[grp];
        const Eigen::Index m = static_cast<Eigen::Index>(modes.size());
        Eigen::MatrixXd rhs(nz_, 2 * m);
        for (Eigen::Index i = 0; i < m; ++i) {
            rhs.col(2 * i) = H.row(modes[i]).real().transpose();
            rhs.col(2 * i + 1) = H.row(modes[i]).imag().transpose();
        }
        const Eigen::MatrixXd sol = lu_[grp].solve(rhs);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (int j = 0; j < nz_; ++j) H(modes[i], j) = Complex(sol(j, 2 * i), sol(j, 2 * i + 1));
        }
    }
    out.resize(r.size());
    Eigen::Map<PlaneField> O(out.data(), n_, nz_);
    RealField x, y;
    for (int j = 0; j < nz_; j += 2) {
        if (j + 1 < nz_) {
            ft_.inverse_pair(H.col(j).array(), H.col(j + 1).array(), x, y);
            O.col(j) = x.matrix();
            O.col(j + 1) = y.matrix();
        } else {
            O.col(j) = ft_.inverse_real(H.col(j).array()).matrix();
        }
    }
}

PlaneField LaplaceSolver::solve(const RealField& top, const PlaneField* source, const RealField* bottom_flux)
{
    check_size(dom_.grid, top.size(), "solve_laplace");
    const int dims = dom_.grid.dims();
    const RealField lap_top = spectral_laplacian(dom_.grid, top);
    const VectorField grad_top = spectral_gradient(dom_.grid, top);
    Eigen::VectorXd b(static_cast<Eigen::Index>(n_) * nz_);
    Eigen::Map<PlaneField> B(b.data(), n_, nz_);
    for (int r = 1; r < nz_; ++r) {
        B.col(r - 1) = (-dom_.alpha.col(r).array() * lap_top).matrix();
        if (source) B.col(r - 1) += source->col(r);
    }
    RealField bot = RealField::Zero(n_);
    for (int a = 0; a < dims; ++a) bot += dom_.grad_rho[a].col(nz_).array() * grad_top[a];
    if (bottom_flux) {
        check_size(dom_.grid, bottom_flux->size(), "solve_laplace bottom flux");
        bot += *bottom_flux;
    }
    B.col(nz_ - 1) = bot.matrix();

    GmresOptions opt;
    opt.tol = params_.tol;
    opt.restart = params_.restart;
    opt.max_iter = params_.max_iter;
    auto A = [this](const Eigen::VectorXd& u, Eigen::VectorXd& o) { matvec(u, o); };
    auto M = [this](const Eigen::VectorXd& u, Eigen::VectorXd& o) { precondition(u, o); };
    GmresResult res = gmres(A, M, b, opt);
    stats_.iterations = res.iterations;
    stats_.residual_history = std::move(res.residual_history);

    PlaneField phi(n_, nz_ + 1);
    phi.col(0) = top.matrix();
    phi.rightCols(nz_) = Eigen::Map<const PlaneField>(res.x.data(), n_, nz_);
    phi.rightCols(nz_).colwise() += top.matrix();
    return phi;
}

std::vector<PlaneField> LaplaceSolver::grad_x(const PlaneField& phi)
{
    PlaneField lap;
    std::vector<PlaneField> gx, gxz;
    plane_spectral(phi, PlaneField::Zero(phi.rows(), phi.cols()), lap, gx, gxz);
    return gx;
}

RealField LaplaceSolver::conormal(const PlaneField& phi, int plane)
{
    const Eigen::VectorXd fz = phi * dom_.column.D.row(plane).transpose();
    const VectorField gx = spectral_gradient(dom_.grid, RealField(phi.col(plane).array()));
    RealField out = dom_.g1.col(plane).array() * fz.array();
    for (int a = 0; a < dom_.grid.dims(); ++a) out -= dom_.grad_rho[a].col(plane).array() * gx[a];
    return out;
}

PlaneField LaplaceSolver::lambda1(const PlaneField& f) const { return (dz(f).array() / dom_.rho_z.array()).matrix(); }

std::vector<PlaneField> LaplaceSolver::lambda2(const PlaneField& f)
{
    const PlaneField fz = dz(f);
    std::vector<PlaneField> g = grad_x(f);
    for (std::size_t a = 0; a < g.size(); ++a)
        g[a].array() -= dom_.grad_rho[a].array() / dom_.rho_z.array() * fz.array();
    return g;
}

PlaneField solve_laplace(const StraightenedDomain& dom, const RealField& psi, const PlaneField* source, const DnoParams& params)
{
    LaplaceSolver s(dom, params);
    return s.solve(psi, source);
}

DnoSolver::DnoSolver(const PeriodicGrid& grid, const DnoParams& params) : grid_(grid), params_(params) {}

void DnoSolver::set_surface(const RealField& eta)
{
    check_size(grid_, eta.size(), "DnoSolver::set_surface");
    if (solver_ && eta_.size() == eta.size() && (eta_ == eta).all()) return;
    eta_ = eta;
    solver_ = std::make_unique<LaplaceSolver>(straighten(grid_, eta, params_), params_);
}

RealField DnoSolver::apply(const RealField& psi)
{
    if (!solver_) set_surface(RealField::Zero(grid_.size()));
    phi_ = solver_->solve(psi);
    return solver_->conormal(phi_, 0);
}

RealField dirichlet_neumann(const PeriodicGrid& grid, const RealField& eta, const RealField& psi, const DnoParams& params)
{
    DnoSolver s(grid, params);
    s.set_surface(eta);
    return s.apply(psi);
}

RealField dno_principal_symbol(const PeriodicGrid& grid, const RealField& eta, const Frequency& xi)
{
    if (xi.norm() == 0.0) throw std::domain_error("principal symbol is homogeneous and undefined at xi = 0");
    const VectorField ge = spectral_gradient(grid, eta);
    RealField q = RealField::Constant(grid.size(), xi.squaredNorm());
    RealField dot = RealField::Zero(grid.size());
    for (int a = 0; a < grid.dims(); ++a) {
        q += ge[a].square() * xi.squaredNorm();
        dot += ge[a] * xi(a);
    }
    return (q - dot.square()).max(0.0).sqrt();
}

ParaSymbol dno_symbol(const PeriodicGrid& grid, const RealField& eta)
{
    ParaSymbol s;
    s.order = 1.0;
    s.regularity = 0.5;
    s.homogeneous = true;
    const VectorField ge = spectral_gradient(grid, eta);
    s.eval = [ge, n = grid.size()](const Frequency& xi) {
        if (xi.norm() == 0.0) throw std::domain_error("principal symbol is homogeneous and undefined at xi = 0");
        RealField q = RealField::Constant(n, xi.squaredNorm());
        RealField dot = RealField::Zero(n);
        for (std::size_t a = 0; a < ge.size(); ++a) {
            q += ge[a].square() * xi.squaredNorm();
            dot += ge[a] * xi(a);
        }
        return (q - dot.square()).max(0.0).sqrt().cast<Complex>().eval();
    };
    return s;
}

RealField dno_remainder(DnoSolver& dno, const RealField& eta, const RealField& psi, const CutoffPair& cut)
{
    dno.set_surface(eta);
    const RealField g = dno.apply(psi);
    return g - paradiff_apply(dno.grid(), dno_symbol(dno.grid(), eta), psi, cut);
}

}  // namespace ulwaves
