#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace flytts {

// Dense row-major float32 array. Rank 1 for parameter vectors, rank 2 for
// channel-by-frame activations [C x T], rank 3 for conv kernels
// [C_out x C_in x K].
struct FrameTensor {
    std::vector<int> shape;
    std::vector<float> data;

    FrameTensor() = default;
    explicit FrameTensor(std::vector<int> extents, float fill = 0.0f);
    static FrameTensor from(std::vector<int> extents, std::vector<float> values);

    int rank() const { return static_cast<int>(shape.size()); }
    int dim(int i) const;
    std::int64_t numel() const;
    bool same_shape(const FrameTensor& other) const { return shape == other.shape; }

    // Rank-2 access: channel c, frame t.
    float& at(int c, int t);
    const float& at(int c, int t) const;

    // Rank-3 access.
    float& at3(int a, int b, int c);
    const float& at3(int a, int b, int c) const;

    // Contiguous row of a rank-2 tensor.
    std::span<float> row(int c);
    std::span<const float> row(int c) const;

    std::span<const float> flat() const { return {data.data(), data.size()}; }
    std::span<float> flat() { return {data.data(), data.size()}; }
};

std::string shape_str(const FrameTensor& t);
bool all_finite(const FrameTensor& t);

}  // namespace flytts
