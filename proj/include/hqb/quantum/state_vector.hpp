// Copyright 2026 The hqb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Dense n-qubit state vector and the {H, Ry, CNOT} gate kernels.
 *
 * Basis index convention: qubit 0 is the most significant bit, so for n
 * qubits the bit of qubit q has weight 2^(n-1-q). |10> on two qubits is
 * basis index 2.
 */
#pragma once

#include "hqb/error.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace hqb::quantum {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 20;

class StateVector {
  public:
    /// |0...0> on `n_qubits` wires.
    explicit StateVector(std::size_t n_qubits) : n_qubits_(n_qubits) {
        check_qubit_count(n_qubits);
        amplitudes_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
        amplitudes_[0] = Complex{1.0, 0.0};
    }

    /// Adopts raw amplitudes; the length must be a power of two.
    static StateVector from_amplitudes(std::vector<Complex> amplitudes) {
        const std::size_t len = amplitudes.size();
        if (len < 2 || (len & (len - 1)) != 0) {
            throw DimensionError("amplitude count " + std::to_string(len) +
                                 " is not a power of two >= 2");
        }
        std::size_t n = 0;
        while ((std::size_t{1} << n) < len) {
            ++n;
        }
        StateVector s(n);
        s.amplitudes_ = std::move(amplitudes);
        return s;
    }

    [[nodiscard]] std::size_t n_qubits() const noexcept { return n_qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amplitudes_.size(); }

    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept {
        return amplitudes_;
    }
    [[nodiscard]] std::span<Complex> amplitudes() noexcept { return amplitudes_; }

    const Complex &operator[](std::size_t i) const { return amplitudes_[i]; }
    Complex &operator[](std::size_t i) { return amplitudes_[i]; }

    [[nodiscard]] double norm() const {
        double acc = 0.0;
        for (const auto &a : amplitudes_) {
            acc += std::norm(a);
        }
        return std::sqrt(acc);
    }

    /// Bit mask selecting qubit `q` in a basis index.
    [[nodiscard]] std::size_t mask(std::size_t qubit) const {
        check_qubit(qubit);
        return std::size_t{1} << (n_qubits_ - 1 - qubit);
    }

    void apply_hadamard(std::size_t qubit) {
        const std::size_t m = mask(qubit);
        const double r = 0.70710678118654752440;
        for_each_pair(m, [r](Complex &a0, Complex &a1) {
            const Complex x = a0;
            const Complex y = a1;
            a0 = r * (x + y);
            a1 = r * (x - y);
        });
    }

    void apply_hadamard_all() {
        for (std::size_t q = 0; q < n_qubits_; ++q) {
            apply_hadamard(q);
        }
    }

    /// Ry(angle) = [[cos(a/2), -sin(a/2)], [sin(a/2), cos(a/2)]].
    void apply_ry(std::size_t qubit, double angle) {
        const std::size_t m = mask(qubit);
        const double c = std::cos(0.5 * angle);
        const double s = std::sin(0.5 * angle);
        for_each_pair(m, [c, s](Complex &a0, Complex &a1) {
            const Complex x = a0;
            const Complex y = a1;
            a0 = c * x - s * y;
            a1 = s * x + c * y;
        });
    }

    /// Applies (-i/2) Y to `qubit`, the generator factor of d Ry / d angle.
    void apply_ry_generator(std::size_t qubit) {
        const std::size_t m = mask(qubit);
        for_each_pair(m, [](Complex &a0, Complex &a1) {
            const Complex x = a0;
            a0 = -0.5 * a1;
            a1 = 0.5 * x;
        });
    }

    void apply_cnot(std::size_t control, std::size_t target) {
        if (control == target) {
            throw DomainError("CNOT control and target must differ (both " +
                              std::to_string(control) + ")");
        }
        const std::size_t cm = mask(control);
        const std::size_t tm = mask(target);
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if ((i & cm) != 0 && (i & tm) == 0) {
                std::swap(amplitudes_[i], amplitudes_[i | tm]);
            }
        }
    }

    static void check_qubit_count(std::size_t n_qubits) {
        if (n_qubits < 1 || n_qubits > kMaxQubits) {
            throw CapacityError("qubit count " + std::to_string(n_qubits) +
                                " outside [1, " + std::to_string(kMaxQubits) + "]");
        }
    }

  private:
    void check_qubit(std::size_t qubit) const {
        if (qubit >= n_qubits_) {
            throw DomainError("qubit index " + std::to_string(qubit) +
                              " out of range for " + std::to_string(n_qubits_) +
                              " qubits");
        }
    }

    /// Visits (a[i], a[i | m]) for every index i with the masked bit clear.
    template <typename F> void for_each_pair(std::size_t m, F &&f) {
        const std::size_t len = amplitudes_.size();
        for (std::size_t block = 0; block < len; block += 2 * m) {
            for (std::size_t i = block; i < block + m; ++i) {
                f(amplitudes_[i], amplitudes_[i + m]);
            }
        }
    }

    std::size_t n_qubits_;
    std::vector<Complex> amplitudes_;
};

inline StateVector init_zero_state(std::size_t n_qubits) {
    return StateVector(n_qubits);
}

inline StateVector apply_hadamard_all(StateVector state) {
    state.apply_hadamard_all();
    return state;
}

inline StateVector apply_ry(StateVector state, std::size_t qubit, double angle) {
    state.apply_ry(qubit, angle);
    return state;
}

inline StateVector apply_cnot(StateVector state, std::size_t control,
                              std::size_t target) {
    state.apply_cnot(control, target);
    return state;
}

/// <a|b>
inline Complex inner_product(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) {
        throw DimensionError("inner product of states with different sizes");
    }
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

} // namespace hqb::quantum
