#pragma once

#include "vseg/inference.hpp"
#include "vseg/tensor.hpp"

namespace vseg {

// Vessel-score heatmap of the fused map, values in [0,1].
GrayImage score_heatmap(const ProbabilityMap& p);

// Vessel-score image of one side-output tensor (batch index 0).
GrayImage side_heatmap(const Tensor& side_map, const std::vector<int>& vessel_classes);

// Source image with false negatives painted blue and false positives red.
// With a FOV mask, only pixels inside it are compared.
FundusImage error_overlay(const FundusImage& src, const BinaryMask& pred, const BinaryMask& gt,
                          const BinaryMask* fov = nullptr);

FundusImage mask_to_image(const BinaryMask& mask);

}  // namespace vseg
