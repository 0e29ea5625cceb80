#pragma once
// Dense CHW tensor over a configurable scalar type. float is the training
// precision; the same templates instantiated with double back the
// finite-difference gradient checks.

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace csdr {

template <typename Real>
struct TensorT {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<Real> data;

    TensorT() = default;
    TensorT(int c, int h, int w)
        : channels(c), height(h), width(w), data(checked_size(c, h, w), Real(0)) {}

    std::size_t size() const { return data.size(); }
    std::size_t plane() const { return std::size_t(height) * width; }

    Real& at(int c, int i, int j) { return data[(std::size_t(c) * height + i) * width + j]; }
    Real at(int c, int i, int j) const { return data[(std::size_t(c) * height + i) * width + j]; }

    Real* row(int c, int i) { return data.data() + (std::size_t(c) * height + i) * width; }
    const Real* row(int c, int i) const { return data.data() + (std::size_t(c) * height + i) * width; }

    Real* chan(int c) { return data.data() + std::size_t(c) * plane(); }
    const Real* chan(int c) const { return data.data() + std::size_t(c) * plane(); }

    bool same_shape(const TensorT& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }

    void reshape(int c, int h, int w) {
        const std::size_t n = checked_size(c, h, w);
        channels = c;
        height = h;
        width = w;
        data.assign(n, Real(0));
    }

    void fill(Real v) { data.assign(data.size(), v); }

private:
    static std::size_t checked_size(int c, int h, int w) {
        if (c < 0 || h < 0 || w < 0) throw std::invalid_argument("tensor: negative dimension");
        return std::size_t(c) * std::size_t(h) * std::size_t(w);
    }
};

using Tensor = TensorT<float>;

} // namespace csdr
