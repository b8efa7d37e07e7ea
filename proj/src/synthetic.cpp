#include "idsfed/synthetic.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "idsfed/rng.hpp"

namespace idsfed {

FeatureMatrix generate_synthetic(std::size_t n, std::size_t d, double separation,
                                 double class_ratio, std::uint64_t seed) {
    if (n < 4) throw std::invalid_argument("generate_synthetic: n must be >= 4");
    if (d < 1) throw std::invalid_argument("generate_synthetic: d must be >= 1");
    if (!(separation > 0.0)) {
        throw std::invalid_argument("generate_synthetic: separation must be positive");
    }
    const auto n_attack = static_cast<std::size_t>(
        std::llround(class_ratio * static_cast<double>(n)));
    if (n_attack < 2 || n - n_attack < 2) {
        throw std::invalid_argument("generate_synthetic: class_ratio leaves a class under 2 rows");
    }

    auto eng = rng::make_engine(seed, 0x5E);

    std::vector<double> direction(d);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& u : direction) {
            u = rng::normal(eng);
            norm += u * u;
        }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (double& u : direction) u /= norm;

    FeatureMatrix m;
    m.n_rows = n;
    m.n_cols = d;
    m.values.resize(n * d);
    m.labels.resize(n);
    m.feature_names.reserve(d);
    for (std::size_t c = 0; c < d; ++c) m.feature_names.push_back("f" + std::to_string(c));

    const double half = separation / 2.0;
    for (std::size_t r = 0; r < n; ++r) {
        const int label = r < n_attack ? 1 : 0;
        const double sign = label == 1 ? 1.0 : -1.0;
        m.labels[r] = label;
        for (std::size_t c = 0; c < d; ++c) {
            m.values[r * d + c] = sign * half * direction[c] + rng::normal(eng);
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng::shuffle(eng, order);
    return m.take_rows(order);
}

}  // namespace idsfed
