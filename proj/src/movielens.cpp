#include "orgrad/movielens.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "orgrad/tensor.hpp"

namespace orgrad {

namespace {

std::int64_t parse_field_int(const std::string& s, int lineno, const char* what) {
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
        throw std::runtime_error("ratings line " + std::to_string(lineno) + ": bad " + what +
                                 " '" + s + "'");
    return static_cast<std::int64_t>(v);
}

double parse_field_double(const std::string& s, int lineno, const char* what) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
        throw std::runtime_error("ratings line " + std::to_string(lineno) + ": bad " + what +
                                 " '" + s + "'");
    return v;
}

}  // namespace

std::vector<RatingRecord> load_ratings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open ratings file: " + path);
    std::vector<RatingRecord> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string cur;
        for (char c : line) {
            if (c == '\t') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        fields.push_back(cur);
        if (fields.size() != 4)
            throw std::runtime_error("ratings line " + std::to_string(lineno) +
                                     ": expected 4 tab-separated fields, got " +
                                     std::to_string(fields.size()));
        RatingRecord r;
        r.user = parse_field_int(fields[0], lineno, "user id");
        r.item = parse_field_int(fields[1], lineno, "item id");
        r.rating = parse_field_double(fields[2], lineno, "rating");
        r.timestamp = parse_field_int(fields[3], lineno, "timestamp");
        if (r.user < 1 || r.item < 1)
            throw std::runtime_error("ratings line " + std::to_string(lineno) +
                                     ": ids must be positive");
        out.push_back(r);
    }
    return out;
}

void save_ratings(const std::string& path, const std::vector<RatingRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const RatingRecord& r : records) {
        out << r.user << '\t' << r.item << '\t';
        if (r.rating == std::floor(r.rating) && std::abs(r.rating) < 1e15) {
            out << static_cast<long long>(r.rating);
        } else {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", r.rating);
            out << buf;
        }
        out << '\t' << r.timestamp << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

RatingSplit chronological_split(std::vector<RatingRecord> records, std::int64_t train_count) {
    if (train_count < 1) throw std::invalid_argument("train_count must be positive");
    if (static_cast<std::int64_t>(records.size()) <= train_count)
        throw std::runtime_error("need at least " + std::to_string(train_count + 1) +
                                 " ratings, got " + std::to_string(records.size()));
    std::stable_sort(records.begin(), records.end(),
                     [](const RatingRecord& a, const RatingRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    RatingSplit split;
    split.train.assign(records.begin(), records.begin() + train_count);
    split.test.assign(records.begin() + train_count, records.end());
    return split;
}

namespace {

constexpr double kRatingMin = 1.0, kRatingMax = 5.0;

double clip_rating(double v) { return std::min(kRatingMax, std::max(kRatingMin, v)); }

std::vector<Observation> make_observations(const std::vector<RatingRecord>& records,
                                           const Dims& dims, double mean) {
    const double root_dstar =
        std::sqrt(static_cast<double>(dims[0]) * static_cast<double>(dims[1]));
    std::vector<Observation> obs;
    obs.reserve(records.size());
    std::int64_t t = 0;
    for (const RatingRecord& r : records) {
        if (r.user > dims[0] || r.item > dims[1])
            throw std::runtime_error("rating index (" + std::to_string(r.user) + ", " +
                                     std::to_string(r.item) + ") outside a " +
                                     std::to_string(dims[0]) + " x " + std::to_string(dims[1]) +
                                     " matrix");
        Observation o;
        o.x.kind = DesignKind::Entry;
        o.x.omega = {r.user - 1, r.item - 1};
        o.x.scale = root_dstar;
        o.y = root_dstar * (r.rating - mean);
        o.t = t++;
        obs.push_back(std::move(o));
    }
    return obs;
}

TuckerTensor fit_one(const std::vector<Observation>& obs, const Dims& dims, std::int64_t rank,
                     double eta, bool online, std::int64_t offline_iters) {
    const Dims ranks = {rank, rank};
    TuckerTensor init = init_second_moment(obs, dims, ranks);
    const LossModel model = LossModel::linear();
    if (!online) return offline_rgrad(obs, std::move(init), model, eta, offline_iters);
    LearnerState state{std::move(init), 0, StepSchedule::fixed(eta), model};
    ReplayStream stream(obs);
    RunOptions opt;
    opt.horizon = static_cast<std::int64_t>(obs.size());
    RunResult res = run(std::move(state), stream, nullptr, opt);
    if (res.log.diverged)
        throw DivergenceError(res.log.diverged_at);
    return std::move(res.final_estimate);
}

double mae_of_fit(const TuckerTensor& fit, double mean, const std::vector<RatingRecord>& test) {
    const DenseTensor dense = materialize(fit);
    return rating_mae(dense, mean, test);
}

}  // namespace

double rating_mae(const DenseTensor& estimate, double train_mean,
                  const std::vector<RatingRecord>& test) {
    if (test.empty()) throw std::invalid_argument("rating_mae: empty test set");
    if (estimate.order() != 2) throw std::invalid_argument("rating_mae: need a matrix");
    double acc = 0;
    for (const RatingRecord& r : test) {
        if (r.user > estimate.dims[0] || r.item > estimate.dims[1])
            throw std::runtime_error("test rating outside the estimate's shape");
        const double raw = estimate.at({r.user - 1, r.item - 1}) + train_mean;
        acc += std::abs(clip_rating(raw) - r.rating);
    }
    return acc / static_cast<double>(test.size());
}

MovielensReport movielens_eval(const RatingSplit& split, const std::string& mode,
                               const MovielensOptions& opt) {
    const bool want_online = mode == "online" || mode == "both";
    const bool want_offline = mode == "offline" || mode == "both";
    if (!want_online && !want_offline)
        throw std::invalid_argument("movielens mode must be online, offline, or both");
    if (split.train.empty() || split.test.empty())
        throw std::invalid_argument("movielens_eval: empty split");
    if (opt.dims.size() != 2) throw std::invalid_argument("movielens_eval: dims must be 2-d");
    if (opt.holdout < 1 ||
        opt.holdout >= static_cast<std::int64_t>(split.train.size()))
        throw std::invalid_argument("movielens_eval: holdout must cut the train split");

    MovielensReport report;
    double sum = 0;
    for (const RatingRecord& r : split.train) sum += r.rating;
    report.train_mean = sum / static_cast<double>(split.train.size());

    double base = 0;
    for (const RatingRecord& r : split.test)
        base += std::abs(clip_rating(report.train_mean) - r.rating);
    report.baseline_mae = base / static_cast<double>(split.test.size());

    // eta is picked on the chronological tail of the train split, then the
    // winner is refit on the full train split.
    const std::int64_t fit_count = static_cast<std::int64_t>(split.train.size()) - opt.holdout;
    const std::vector<RatingRecord> fit_part(split.train.begin(),
                                             split.train.begin() + fit_count);
    const std::vector<RatingRecord> val_part(split.train.begin() + fit_count,
                                             split.train.end());

    const std::vector<Observation> full_obs =
        make_observations(split.train, opt.dims, report.train_mean);
    const std::vector<Observation> fit_obs =
        make_observations(fit_part, opt.dims, report.train_mean);

    auto eval_method = [&](const char* method, bool online,
                           const std::vector<double>& grid) {
        for (std::int64_t rank : opt.ranks) {
            if (rank < 1 || rank > opt.dims[0] || rank > opt.dims[1])
                throw std::invalid_argument("movielens_eval: rank out of range");
            double best_eta = 0, best_mae = std::numeric_limits<double>::infinity();
            for (double eta : grid) {
                double mae = std::numeric_limits<double>::infinity();
                try {
                    const TuckerTensor fit =
                        fit_one(fit_obs, opt.dims, rank, eta, online, opt.offline_iters);
                    mae = mae_of_fit(fit, report.train_mean, val_part);
                } catch (const DivergenceError&) {
                }
                if (std::isfinite(mae) && mae < best_mae) {
                    best_mae = mae;
                    best_eta = eta;
                }
            }
            if (!std::isfinite(best_mae))
                throw std::runtime_error(std::string("movielens_eval: every eta diverged for ") +
                                         method + " rank " + std::to_string(rank));
            const TuckerTensor fit =
                fit_one(full_obs, opt.dims, rank, best_eta, online, opt.offline_iters);
            MovielensCell cell;
            cell.method = method;
            cell.rank = rank;
            cell.eta = best_eta;
            cell.mae = mae_of_fit(fit, report.train_mean, split.test);
            report.cells.push_back(std::move(cell));
        }
    };

    if (want_online) eval_method("online", true, opt.eta_grid);
    if (want_offline) eval_method("offline", false, opt.offline_eta_grid);
    return report;
}

void write_movielens_csv(const std::string& path, const std::vector<std::string>& comments,
                         const MovielensReport& report,
                         const std::vector<std::int64_t>& ranks) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const std::string& c : comments) out << "# " << c << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", report.train_mean);
    out << "# train_mean: " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", report.baseline_mae);
    out << "# baseline_mae: " << buf << "\n";
    for (const MovielensCell& c : report.cells)
        out << "# eta_" << c.method << "_r" << c.rank << ": " << c.eta << "\n";
    out << "method";
    for (std::int64_t r : ranks) out << ",r_" << r;
    out << "\n";
    for (const char* method : {"online", "offline"}) {
        bool any = false;
        for (const MovielensCell& c : report.cells) any = any || c.method == method;
        if (!any) continue;
        out << method;
        for (std::int64_t r : ranks) {
            double mae = std::nan("");
            for (const MovielensCell& c : report.cells)
                if (c.method == method && c.rank == r) mae = c.mae;
            std::snprintf(buf, sizeof(buf), "%.17g", mae);
            out << ',' << buf;
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace orgrad
