#pragma once

#include <cstddef>
#include <vector>

#include "delaywave/errors.hpp"

namespace delaywave {

/// Ring buffer of the most recent `capacity` samples with random access by lag.
class DelayLine {
public:
    explicit DelayLine(std::size_t capacity) : buffer_(capacity, 0.0) {}

    std::size_t capacity() const { return buffer_.size(); }

    /// Number of samples currently held.
    std::size_t size() const { return pushed_ < buffer_.size() ? pushed_ : buffer_.size(); }

    void push(double value) {
        if (buffer_.empty()) return;
        head_ = head_ + 1 == buffer_.size() ? 0 : head_ + 1;
        buffer_[head_] = value;
        ++pushed_;
    }

    /// Sample pushed `k` pushes ago; lag 0 is the latest.
    double lag(std::size_t k) const {
        if (k >= size()) throw RangeError("DelayLine: lag beyond stored history");
        return buffer_[(head_ + buffer_.size() - k) % buffer_.size()];
    }

private:
    std::vector<double> buffer_;
    std::size_t head_ = 0;
    std::size_t pushed_ = 0;
};

}  // namespace delaywave
