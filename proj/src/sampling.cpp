#include "orgrad/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include "orgrad/svd.hpp"

namespace orgrad {

DesignKind parse_design(const std::string& name) {
    if (name == "gaussian") return DesignKind::Gaussian;
    if (name == "entry") return DesignKind::Entry;
    throw std::invalid_argument("unknown design: " + name);
}

Covariate draw_covariate(DesignKind kind, const Dims& dims, Rng& rng) {
    Covariate x;
    x.kind = kind;
    if (kind == DesignKind::Gaussian) {
        x.dense = DenseTensor(dims);
        for (double& v : x.dense.entries) v = rng.normal();
    } else {
        x.omega.resize(dims.size());
        for (std::size_t j = 0; j < dims.size(); ++j) x.omega[j] = rng.uniform_int(dims[j]);
        x.scale = std::sqrt(static_cast<double>(tensor_size(dims)));
    }
    return x;
}

double covariate_inner(const Covariate& x, const TuckerTensor& t) {
    if (x.kind == DesignKind::Gaussian) return inner(t, x.dense);
    return x.scale * entry_at(t, x.omega);
}

double covariate_inner(const Covariate& x, const DenseTensor& t) {
    if (x.kind == DesignKind::Gaussian) return inner(x.dense, t);
    return x.scale * t.at(x.omega);
}

TangentVector project_tangent(const TuckerTensor& point, const Covariate& x) {
    if (x.kind == DesignKind::Gaussian) return project_tangent(point, x.dense);
    return project_tangent_entry(point, x.omega, x.scale);
}

DenseTensor densify(const Covariate& x, const Dims& dims) {
    if (x.kind == DesignKind::Gaussian) {
        if (x.dense.dims != dims) throw std::invalid_argument("covariate dimension mismatch");
        return x.dense;
    }
    DenseTensor out(dims);
    out.at(x.omega) = x.scale;
    return out;
}

Truth gen_truth(const TruthSpec& spec, Rng& rng) {
    Truth out;
    if (spec.recipe == "regression_7_1") {
        DenseTensor core(spec.ranks);
        for (double& v : core.entries) v = rng.normal();
        DenseTensor t = core;
        for (std::size_t j = 0; j < spec.dims.size(); ++j) {
            Matrix u(spec.dims[j], spec.ranks[j]);
            for (Eigen::Index c = 0; c < u.cols(); ++c)
                for (Eigen::Index i = 0; i < u.rows(); ++i) u(i, c) = rng.uniform();
            t = mode_product(t, u, static_cast<int>(j));
        }
        out.tensor = hosvd(t, spec.ranks);
    } else if (spec.recipe == "completion_7_2") {
        DenseTensor t(spec.dims);
        for (double& v : t.entries) v = rng.uniform();
        out.tensor = hosvd(t, spec.ranks);
    } else if (spec.recipe == "matrix_7_3") {
        if (spec.dims.size() != 2) throw std::invalid_argument("matrix_7_3 needs an order-2 shape");
        DenseTensor t(spec.dims);
        for (double& v : t.entries) v = rng.normal();
        out.tensor = hosvd(t, spec.ranks);
    } else if (spec.recipe == "explicit") {
        if (spec.explicit_tensor.dims != spec.dims)
            throw std::invalid_argument("explicit truth does not match requested dimensions");
        out.tensor = hosvd(spec.explicit_tensor, spec.ranks);
    } else {
        throw std::invalid_argument("unknown truth recipe: " + spec.recipe);
    }
    out.report = spectral_report(out.tensor);
    return out;
}

ModelStream::ModelStream(const TuckerTensor& truth, DesignKind design, LossModel model,
                         std::uint64_t seed)
    : truth_(truth), dims_(truth.dims()), design_(design), model_(model), rng_(seed) {
    if (design_ == DesignKind::Gaussian) truth_dense_ = materialize(truth_);
}

Observation ModelStream::next() {
    Observation obs;
    obs.x = draw_covariate(design_, dims_, rng_);
    const double theta = design_ == DesignKind::Gaussian
                             ? covariate_inner(obs.x, truth_dense_)
                             : covariate_inner(obs.x, truth_);
    obs.y = sample_response(model_, theta, rng_);
    obs.t = t_++;
    return obs;
}

Observation ReplayStream::next() {
    if (pos_ >= obs_.size()) throw std::out_of_range("replay stream exhausted");
    return obs_[pos_++];
}

TuckerTensor init_oracle_perturb(const TuckerTensor& truth, double c, Rng& rng) {
    if (!(c > 0.0 && c < 0.5)) throw std::invalid_argument("oracle perturbation needs 0 < c < 1/2");
    const Dims ranks = truth.ranks();
    double lambda_min = std::numeric_limits<double>::infinity();
    for (int j = 0; j < truth.order(); ++j)
        lambda_min =
            std::min(lambda_min, thin_svd(matricize(truth.core, j), ranks[j]).s(ranks[j] - 1));

    const DenseTensor dense = materialize(truth);
    DenseTensor dir(dense.dims);
    for (double& v : dir.entries) v = rng.normal();
    const double nn = fro_norm(dir);
    for (double& v : dir.entries) v /= nn;

    const double lo_target = 0.8 * c * lambda_min, hi_target = c * lambda_min;
    auto truncate_at = [&](double delta) {
        DenseTensor shifted = dense;
        axpy(delta, dir, shifted);
        return hosvd(shifted, ranks);
    };
    // The distance grows continuously from 0 in delta; expand past the band,
    // then bisect into it.
    double lo = 0.0, hi = hi_target;
    TuckerTensor cand = truncate_at(hi);
    double dist = fro_dist(cand, truth);
    for (int expand = 0; dist < lo_target; ++expand) {
        if (expand >= 60) throw std::runtime_error("oracle perturbation could not reach the band");
        lo = hi;
        hi *= 2.0;
        cand = truncate_at(hi);
        dist = fro_dist(cand, truth);
    }
    for (int iter = 0; iter < 200 && (dist < lo_target || dist > hi_target); ++iter) {
        const double mid = 0.5 * (lo + hi);
        cand = truncate_at(mid);
        dist = fro_dist(cand, truth);
        (dist > hi_target ? hi : lo) = mid;
    }
    if (dist < lo_target || dist > hi_target)
        throw std::runtime_error("oracle perturbation bisection did not converge");
    return cand;
}

TuckerTensor init_second_moment(const std::vector<Observation>& obs, const Dims& dims,
                                const Dims& ranks) {
    if (obs.empty()) throw std::invalid_argument("spectral start needs at least one observation");
    DenseTensor acc(dims);
    const double inv_n = 1.0 / static_cast<double>(obs.size());
    for (const Observation& o : obs) {
        if (o.x.kind == DesignKind::Gaussian)
            axpy(o.y * inv_n, o.x.dense, acc);
        else
            acc.at(o.x.omega) += o.y * o.x.scale * inv_n;
    }
    return hosvd(acc, ranks);
}

}  // namespace orgrad
