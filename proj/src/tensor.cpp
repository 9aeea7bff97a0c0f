#include "flytts/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace flytts {

namespace {

std::int64_t product(const std::vector<int>& extents) {
    std::int64_t n = 1;
    for (int e : extents) {
        if (e <= 0) {
            throw std::invalid_argument("FrameTensor: non-positive extent");
        }
        n *= e;
    }
    return n;
}

}  // namespace

FrameTensor::FrameTensor(std::vector<int> extents, float fill)
    : shape(std::move(extents)), data(static_cast<size_t>(product(shape)), fill) {}

FrameTensor FrameTensor::from(std::vector<int> extents, std::vector<float> values) {
    FrameTensor t;
    t.shape = std::move(extents);
    if (product(t.shape) != static_cast<std::int64_t>(values.size())) {
        throw std::invalid_argument("FrameTensor::from: element count does not match shape");
    }
    t.data = std::move(values);
    return t;
}

int FrameTensor::dim(int i) const {
    if (i < 0 || i >= rank()) {
        throw std::invalid_argument("FrameTensor::dim: axis out of range");
    }
    return shape[static_cast<size_t>(i)];
}

float& FrameTensor::at(int c, int t) {
    return data[static_cast<size_t>(c) * shape[1] + t];
}

const float& FrameTensor::at(int c, int t) const {
    return data[static_cast<size_t>(c) * shape[1] + t];
}

float& FrameTensor::at3(int a, int b, int c) {
    return data[(static_cast<size_t>(a) * shape[1] + b) * shape[2] + c];
}

const float& FrameTensor::at3(int a, int b, int c) const {
    return data[(static_cast<size_t>(a) * shape[1] + b) * shape[2] + c];
}

std::span<float> FrameTensor::row(int c) {
    return {data.data() + static_cast<size_t>(c) * shape[1], static_cast<size_t>(shape[1])};
}

std::span<const float> FrameTensor::row(int c) const {
    return {data.data() + static_cast<size_t>(c) * shape[1], static_cast<size_t>(shape[1])};
}

std::int64_t FrameTensor::numel() const {
    return static_cast<std::int64_t>(data.size());
}

std::string shape_str(const FrameTensor& t) {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < t.rank(); ++i) {
        if (i) os << "x";
        os << t.shape[static_cast<size_t>(i)];
    }
    os << "]";
    return os.str();
}

bool all_finite(const FrameTensor& t) {
    for (float v : t.data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace flytts
