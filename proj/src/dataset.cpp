#include "qiforest/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qiforest/digest.hpp"
#include "qiforest/rng.hpp"
#include "qiforest/svd.hpp"

namespace qiforest {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current += c;
        }
    }
    fields.push_back(current);
    return fields;
}

bool parse_cell(const std::string& field, double& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    if (begin == end) return false;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    auto last = s.find_last_not_of(" \t\r");
    return s.substr(begin, last - begin + 1);
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw IoError("load_csv: cannot open " + path);

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    if (in.bad()) throw IoError("load_csv: read failure on " + path);

    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw InvalidInput("load_csv: " + path + " is empty");

    std::size_t first_data_line = 0;
    std::vector<std::string> header;
    if (options.has_header) {
        header = split_fields(lines[0]);
        for (std::string& name : header) name = trim(name);
        first_data_line = 1;
    }
    if (first_data_line >= lines.size()) {
        throw InvalidInput("load_csv: " + path + " has no data rows");
    }

    const std::size_t column_count = split_fields(lines[first_data_line]).size();
    if (column_count < 2) {
        throw InvalidInput("load_csv: " + path + " needs a target column and at least one feature");
    }

    std::size_t target = column_count - 1;
    if (options.target_name) {
        if (!options.has_header) {
            throw InvalidInput("load_csv: target by name requires a header row");
        }
        const auto it = std::find(header.begin(), header.end(), *options.target_name);
        if (it == header.end()) {
            throw InvalidInput("load_csv: target column '" + *options.target_name +
                               "' not found in " + path);
        }
        target = static_cast<std::size_t>(it - header.begin());
    } else if (options.target_index) {
        target = *options.target_index;
        if (target >= column_count) {
            throw InvalidInput("load_csv: target index out of range in " + path);
        }
    }

    Dataset ds;
    ds.name = path;
    ds.source_path = path;
    const auto slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    if (base.size() > 4 && base.ends_with(".csv")) base.resize(base.size() - 4);
    ds.name = base;

    std::vector<Vector> feature_rows;
    std::vector<std::string> bad_rows;
    for (std::size_t li = first_data_line; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) {
            bad_rows.push_back("line " + std::to_string(li + 1) + ": blank row");
            continue;
        }
        const std::vector<std::string> fields = split_fields(lines[li]);
        if (fields.size() != column_count) {
            bad_rows.push_back("line " + std::to_string(li + 1) + ": expected " +
                               std::to_string(column_count) + " columns, got " +
                               std::to_string(fields.size()));
            continue;
        }
        Vector features;
        features.reserve(column_count - 1);
        bool row_ok = true;
        double target_value = 0.0;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            double value = 0.0;
            if (!parse_cell(fields[c], value)) {
                bad_rows.push_back("line " + std::to_string(li + 1) + ": column " +
                                   std::to_string(c) + " is missing or non-numeric");
                row_ok = false;
                break;
            }
            if (c == target) {
                target_value = value;
            } else {
                features.push_back(value);
            }
        }
        if (!row_ok) continue;
        feature_rows.push_back(std::move(features));
        ds.y.push_back(target_value);
    }

    if (!bad_rows.empty()) {
        std::ostringstream msg;
        msg << "load_csv: " << path << " has " << bad_rows.size() << " bad row(s):";
        const std::size_t shown = std::min<std::size_t>(bad_rows.size(), 10);
        for (std::size_t i = 0; i < shown; ++i) msg << "\n  " << bad_rows[i];
        if (shown < bad_rows.size()) msg << "\n  ...";
        throw InvalidInput(msg.str());
    }
    if (feature_rows.empty()) throw InvalidInput("load_csv: " + path + " has no data rows");

    ds.x = Matrix::from_rows(feature_rows);
    return ds;
}

void write_csv(const Dataset& dataset, const std::string& path, bool header) {
    std::ofstream out(path);
    if (!out) throw IoError("write_csv: cannot open " + path);
    out.precision(17);

    if (header) {
        for (std::size_t j = 0; j < dataset.x.cols(); ++j) out << "f" << j << ",";
        out << "target\n";
    }
    for (std::size_t i = 0; i < dataset.x.rows(); ++i) {
        for (std::size_t j = 0; j < dataset.x.cols(); ++j) out << dataset.x(i, j) << ",";
        out << dataset.y[i] << "\n";
    }
    if (!out) throw IoError("write_csv: write failure on " + path);
}

void validate_dataset(const Dataset& dataset) {
    if (dataset.x.rows() < 10) {
        throw InvalidInput("dataset '" + dataset.name + "': need at least 10 rows");
    }
    if (dataset.x.cols() == 0) {
        throw InvalidInput("dataset '" + dataset.name + "': no feature columns");
    }
    if (dataset.x.rows() != dataset.y.size()) {
        throw InvalidInput("dataset '" + dataset.name + "': target length mismatch");
    }
    require_finite(dataset.x, "dataset");
    require_finite(std::span(dataset.y), "dataset");
}

namespace {

// Random orthogonal mix so the latent factors are not axis-aligned.
Matrix random_rotation(std::size_t m, Rng& rng) {
    Matrix g(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) g(i, j) = rng.gaussian();
    }
    return svd(g).u;  // full rank with probability 1
}

struct LatentSample {
    Matrix factors;  // n x m latent draws, column k has variance decay^k-ish
    Matrix x;        // rotated observation
};

LatentSample draw_latents(std::size_t n, std::size_t m, Rng& rng) {
    LatentSample sample;
    sample.factors = Matrix(n, m);
    for (std::size_t j = 0; j < m; ++j) {
        const double sd = std::pow(1.0 + static_cast<double>(j), -0.75);
        for (std::size_t i = 0; i < n; ++i) sample.factors(i, j) = sd * rng.gaussian();
    }
    const Matrix rotation = random_rotation(m, rng);
    sample.x = matmul(sample.factors, rotation);
    return sample;
}

// Informative factor positions: a block of strong factors plus one
// mid-spectrum factor, so uniform subspace draws routinely miss signal.
std::vector<std::size_t> informative_factors(std::size_t m) {
    const std::size_t count = std::max<std::size_t>(2, m / 4);
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k + 1 < count; ++k) idx.push_back(k);
    idx.push_back(std::min(m - 1, count + 1));
    return idx;
}

void add_noise(Vector& y, double noise, Rng& rng) {
    if (noise <= 0.0) return;
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(y.size()));
    for (double& v : y) v += noise * sd * rng.gaussian();
}

}  // namespace

Dataset make_linear_dataset(const std::string& name, std::size_t n, std::size_t m,
                            double noise, std::uint64_t seed) {
    if (n < 2 || m == 0) throw InvalidInput("make_linear_dataset: degenerate shape");
    Rng rng = Rng::derive(seed, {stream::data, fnv1a(name)});
    LatentSample sample = draw_latents(n, m, rng);

    Vector beta(m, 0.0);
    for (std::size_t k : informative_factors(m)) {
        const double magnitude = rng.uniform(0.5, 1.5);
        beta[k] = rng.uniform01() < 0.5 ? -magnitude : magnitude;
    }

    Dataset ds;
    ds.name = name;
    ds.x = std::move(sample.x);
    ds.y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) ds.y[i] = dot(sample.factors.row(i), beta);
    add_noise(ds.y, noise, rng);
    return ds;
}

Dataset make_piecewise_dataset(const std::string& name, std::size_t n, std::size_t m,
                               std::size_t steps, double noise, std::uint64_t seed) {
    if (n < 2 || m == 0) throw InvalidInput("make_piecewise_dataset: degenerate shape");
    if (steps == 0) throw InvalidInput("make_piecewise_dataset: steps must be >= 1");
    Rng rng = Rng::derive(seed, {stream::data, fnv1a(name), steps});
    LatentSample sample = draw_latents(n, m, rng);

    const std::vector<std::size_t> drivers = informative_factors(m);
    struct Step {
        std::size_t factor;
        double cut;
        double jump;
    };
    std::vector<Step> plan;
    for (std::size_t s = 0; s < steps; ++s) {
        const std::size_t factor = drivers[s % drivers.size()];
        const double factor_sd = std::pow(1.0 + static_cast<double>(factor), -0.75);
        plan.push_back({factor, factor_sd * rng.uniform(-1.0, 1.0),
                        rng.uniform01() < 0.5 ? -1.0 : 1.0});
    }

    Dataset ds;
    ds.name = name;
    ds.x = std::move(sample.x);
    ds.y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double value = 0.0;
        for (const Step& step : plan) {
            if (sample.factors(i, step.factor) > step.cut) value += step.jump;
        }
        // Mild linear term keeps the first-order picture nontrivial.
        value += 0.5 * sample.factors(i, drivers.front());
        ds.y[i] = value;
    }
    add_noise(ds.y, noise, rng);
    return ds;
}

std::vector<Dataset> make_benchmark_suite(std::uint64_t seed) {
    struct Shape {
        const char* name;
        std::size_t n;
        std::size_t m;
        bool piecewise;
    };
    // Instance/dimension shapes of ten common UCI regression benchmarks.
    const Shape shapes[] = {
        {"synth_abalone", 4177, 8, true},
        {"synth_crime", 1994, 122, false},
        {"synth_crime_unnorm1", 2215, 140, false},
        {"synth_crime_unnorm2", 2215, 140, false},
        {"synth_facebook", 500, 11, true},
        {"synth_fires", 517, 8, true},
        {"synth_housing", 505, 13, true},
        {"synth_slump", 103, 9, false},
        {"synth_wine_red", 1599, 11, true},
        {"synth_wine_white", 4898, 11, true},
    };

    std::vector<Dataset> suite;
    suite.reserve(std::size(shapes));
    for (const Shape& shape : shapes) {
        if (shape.piecewise) {
            suite.push_back(
                make_piecewise_dataset(shape.name, shape.n, shape.m, 6, 0.3, seed));
        } else {
            suite.push_back(make_linear_dataset(shape.name, shape.n, shape.m, 0.3, seed));
        }
    }
    return suite;
}

}  // namespace qiforest
