// grid.hpp - periodic box, dual lattice and discrete Fourier pair
#pragma once

#include <Eigen/Dense>
#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace polaron {

using cplx = std::complex<double>;
using Field = Eigen::ArrayXcd;
using RealField = Eigen::ArrayXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct GridMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace detail {

// FFTW planning is not thread-safe; execution is.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftPlans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    FftPlans(int dim, int n) {
        std::vector<int> dims(dim, n);
        Eigen::Index total = 1;
        for (int a = 0; a < dim; ++a) total *= n;
        Field in(total), out(total);
        auto* pi = reinterpret_cast<fftw_complex*>(in.data());
        auto* po = reinterpret_cast<fftw_complex*>(out.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT;
        std::lock_guard lock(planner_mutex());
        forward = fftw_plan_dft(dim, dims.data(), pi, po, FFTW_FORWARD, flags);
        backward = fftw_plan_dft(dim, dims.data(), pi, po, FFTW_BACKWARD, flags);
        if (!forward || !backward) throw std::runtime_error("fftw planning failed");
    }
    ~FftPlans() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;
};

}  // namespace detail

// Cubic periodic box [0, L)^d with N points per axis. Frequency arrays are
// stored in FFT order: index i on an axis carries mode i for i < N/2 and
// i - N otherwise, so the k-lattice is (2 pi / L) {-N/2, ..., N/2 - 1}.
class Grid {
public:
    Grid(int dim, int points, double length) : dim_(dim), n_(points), length_(length) {
        if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
        if (points < 4 || points % 2 != 0)
            throw std::invalid_argument("grid needs an even number of points, at least 4");
        if (!(length > 0.0)) throw std::invalid_argument("box length must be positive");

        size_ = 1;
        for (int a = 0; a < dim_; ++a) size_ *= n_;
        const double dk1 = two_pi / length_;
        k_.assign(dim_, RealField::Zero(size_));
        modes_.assign(dim_, Eigen::ArrayXi::Zero(size_));
        edge_ = Mask::Constant(size_, false);
        for (Eigen::Index i = 0; i < size_; ++i) {
            Eigen::Index rest = i;
            for (int a = dim_ - 1; a >= 0; --a) {
                const int j = static_cast<int>(rest % n_);
                rest /= n_;
                const int m = j < n_ / 2 ? j : j - n_;
                modes_[a](i) = m;
                k_[a](i) = dk1 * m;
                if (m == -n_ / 2) edge_(i) = true;
            }
        }
        ksq_ = RealField::Zero(size_);
        for (const auto& ka : k_) ksq_ += ka.square();
        kabs_ = ksq_.sqrt();
        plans_ = std::make_shared<const detail::FftPlans>(dim_, n_);
    }

    int dim() const { return dim_; }
    int points() const { return n_; }
    double length() const { return length_; }
    Eigen::Index size() const { return size_; }

    double dx() const { return std::pow(length_ / n_, dim_); }
    double dk() const { return std::pow(two_pi / length_, dim_); }
    // Radius of the largest ball inside the frequency box.
    double nyquist_radius() const { return std::numbers::pi * n_ / length_; }

    const RealField& k(int axis) const { return k_.at(axis); }
    const RealField& ksq() const { return ksq_; }
    const RealField& kabs() const { return kabs_; }
    const Eigen::ArrayXi& mode(int axis) const { return modes_.at(axis); }
    // True on frequencies with some component equal to -N/2; those have no
    // partner under k -> -k on the lattice.
    const Mask& nyquist_edge() const { return edge_; }

    RealField x(int axis) const {
        RealField out(size_);
        for (Eigen::Index i = 0; i < size_; ++i) {
            int m = modes_.at(axis)(i);
            if (m < 0) m += n_;
            out(i) = m * length_ / n_;
        }
        return out;
    }

    // Index of -k (or of the reflected point -x, which has the same layout).
    Eigen::Index reflect(Eigen::Index i) const {
        Eigen::Index out = 0;
        for (int a = 0; a < dim_; ++a) {
            int m = modes_[a](i);
            int j = (-m % n_ + n_) % n_;
            out = out * n_ + j;
        }
        return out;
    }

    // sum_x u(x) e^{-ik.x} and sum_k c(k) e^{ik.x}, unweighted.
    Field sum_forward(const Field& u) const { return run(plans_->forward, u); }
    Field sum_backward(const Field& c) const { return run(plans_->backward, c); }

    // Unitary pair F u = (2 pi)^{-d/2} sum_x u e^{-ik.x} dx and its inverse.
    Field forward(const Field& u) const { return sum_forward(u) * (dx() * norm()); }
    Field inverse(const Field& c) const { return sum_backward(c) * (dk() * norm()); }

    double norm_x(const Field& u) const { return std::sqrt(u.abs2().sum() * dx()); }
    double norm_k(const Field& c) const { return std::sqrt(c.abs2().sum() * dk()); }
    cplx inner_x(const Field& a, const Field& b) const { return (a.conjugate() * b).sum() * dx(); }
    cplx inner_k(const Field& a, const Field& b) const { return (a.conjugate() * b).sum() * dk(); }

    bool same_as(const Grid& o) const {
        return dim_ == o.dim_ && n_ == o.n_ && length_ == o.length_;
    }
    void check(const Field& f) const {
        if (f.size() != size_) throw GridMismatch("field size does not match grid");
    }

private:
    double norm() const { return std::pow(two_pi, -0.5 * dim_); }

    Field run(fftw_plan plan, const Field& in) const {
        check(in);
        Field out(size_);
        fftw_execute_dft(plan,
                         reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                         reinterpret_cast<fftw_complex*>(out.data()));
        return out;
    }

    int dim_;
    int n_;
    double length_;
    Eigen::Index size_ = 0;
    std::vector<RealField> k_;
    std::vector<Eigen::ArrayXi> modes_;
    RealField ksq_, kabs_;
    Mask edge_;
    std::shared_ptr<const detail::FftPlans> plans_;
};

inline Grid build_grid(int dim, int points, double length) { return Grid(dim, points, length); }

}  // namespace polaron
