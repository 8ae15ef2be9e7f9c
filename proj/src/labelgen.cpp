#include "vseg/labelgen.hpp"

#include <algorithm>

namespace vseg {

std::pair<BinaryMask, BinaryMask> split_thick_thin(const BinaryMask& vessels) {
    BinaryMask thick = opening(vessels, StructuringElement::square(3));
    BinaryMask thin(vessels.width, vessels.height);
    for (std::size_t i = 0; i < vessels.data.size(); ++i)
        thin.data[i] = vessels.data[i] && !thick.data[i];
    return {std::move(thick), std::move(thin)};
}

ClassMap build_class_map(const BinaryMask& vessels, int band_radius) {
    if (band_radius < 1) throw ArgumentError("band radius must be >= 1");
    auto [thick, thin] = split_thick_thin(vessels);
    StructuringElement band = StructuringElement::square(2 * band_radius + 1);
    BinaryMask near_thick = dilate(thick, band);
    BinaryMask near_thin = dilate(thin, band);

    ClassMap map(vessels.width, vessels.height);
    for (std::size_t i = 0; i < vessels.data.size(); ++i) {
        if (thick.data[i])
            map.data[i] = 3;
        else if (thin.data[i])
            map.data[i] = 4;
        else if (near_thin.data[i])  // thin band wins where both apply
            map.data[i] = 2;
        else if (near_thick.data[i])
            map.data[i] = 1;
        else
            map.data[i] = 0;
    }
    return map;
}

ClassMap binary_class_map(const BinaryMask& vessels) {
    ClassMap map(vessels.width, vessels.height);
    for (std::size_t i = 0; i < vessels.data.size(); ++i)
        map.data[i] = vessels.data[i] ? 1 : 0;
    return map;
}

std::array<std::size_t, kClassCount> class_histogram(const ClassMap& map) {
    std::array<std::size_t, kClassCount> hist{};
    for (auto v : map.data) {
        if (v >= kClassCount) throw ValidationError("class map holds label outside 0..4");
        ++hist[v];
    }
    return hist;
}

ClassWeights weights_from_frequencies(const std::vector<ClassMap>& maps,
                                      const ClassWeights& boost) {
    if (maps.empty()) throw ArgumentError("weights_from_frequencies needs at least one map");
    boost.validate();

    std::array<std::size_t, kClassCount> counts{};
    std::size_t total = 0;
    for (const auto& m : maps) {
        auto h = class_histogram(m);
        for (int c = 0; c < kClassCount; ++c) counts[c] += h[c];
        total += m.data.size();
    }

    ClassWeights w;
    for (int c = 0; c < kClassCount; ++c) {
        std::size_t n = std::max<std::size_t>(counts[c], 1);
        w[c] = double(total) / (double(kClassCount) * double(n)) * boost[c];
    }
    double lo = *std::min_element(w.w.begin(), w.w.end());
    for (int c = 0; c < kClassCount; ++c) w[c] /= lo;
    return w;
}

}  // namespace vseg
