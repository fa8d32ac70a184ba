#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gadsel/kernels.hpp"
#include "gadsel/rng.hpp"

namespace gadsel {

struct Shape {
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::size_t count() const { return rows * cols; }
    friend bool operator==(const Shape&, const Shape&) = default;
};

// Trainable tensor with Adam moment state. Gradients accumulate during
// backward and are zeroed by adam_step.
struct Parameter {
    Shape shape;
    std::vector<double> values;
    std::vector<double> grad;
    std::vector<double> adam_m;
    std::vector<double> adam_v;
    std::uint64_t step_count = 0;
};

// Glorot-uniform init in +-sqrt(6 / (fan_in + fan_out)).
Parameter glorot_parameter(std::size_t rows, std::size_t cols, Rng& rng);

class Tape;

// Lightweight handle into a tape node.
class Tensor {
public:
    Tensor() = default;
    Tensor(Tape* tape, std::size_t idx) : tape_(tape), idx_(idx) {}

    Shape shape() const;
    std::span<const double> values() const;
    double value(std::size_t r, std::size_t c) const;
    double scalar() const;  // value of a 1x1 tensor
    std::size_t index() const { return idx_; }

private:
    friend class Tape;
    Tape* tape_ = nullptr;
    std::size_t idx_ = 0;
};

// Reverse-mode tape, rebuilt per training step. Forward ops record their
// inputs; backward(loss) accumulates exact gradients into every reachable
// Parameter. One tape belongs to one trial; never shared across threads.
class Tape {
public:
    Tape();

    // When on, every op output is scanned for NaN/Inf (throws
    // NumericalError). Defaults to on in debug builds.
    void set_finite_checks(bool on) { finite_checks_ = on; }

    Tensor constant(Shape shape, std::vector<double> values);
    Tensor constant(Shape shape, const double* values);
    Tensor leaf(Parameter& p);

    Tensor matmul(Tensor a, Tensor b);     // a(m,k) * b(k,n)
    Tensor matmul_nt(Tensor a, Tensor b);  // a(m,k) * b(n,k)^T
    Tensor spmm(const kernels::Csr& s, Tensor x);
    Tensor add(Tensor a, Tensor b);
    Tensor sub(Tensor a, Tensor b);
    Tensor scale(Tensor a, double c);
    Tensor relu(Tensor a);
    Tensor sigmoid(Tensor a);
    Tensor softplus(Tensor a);
    Tensor row_l2_norm(Tensor a);      // (n,m) -> (n,1)
    Tensor mean_over_rows(Tensor a);   // (n,m) -> (1,m)
    Tensor row(Tensor a, std::size_t i);  // (n,m) -> (1,m)
    Tensor frobenius_sq(Tensor a);     // -> (1,1)
    Tensor mean(Tensor a);             // -> (1,1)

    void backward(Tensor loss);

    std::size_t node_count() const { return nodes_.size(); }

private:
    friend class Tensor;

    enum class Op {
        constant,
        leaf,
        matmul,
        matmul_nt,
        spmm,
        add,
        sub,
        scale,
        relu,
        sigmoid,
        softplus,
        row_l2_norm,
        mean_over_rows,
        row,
        frobenius_sq,
        mean,
    };

    struct Node {
        Op op;
        Shape shape;
        std::size_t a = SIZE_MAX;
        std::size_t b = SIZE_MAX;
        double c0 = 0.0;               // scale factor / row index storage
        const kernels::Csr* csr = nullptr;
        Parameter* param = nullptr;
        bool needs_grad = false;
        std::vector<double> value;
        std::vector<double> grad;
    };

    Tensor push(Node&& n);
    void check_finite(const Node& n) const;

    std::vector<Node> nodes_;
    bool finite_checks_;
};

// Bias-corrected Adam update over all parameters; gradients are zeroed
// afterwards. Throws NumericalError on non-finite gradients.
void adam_step(const std::vector<Parameter*>& params, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

}  // namespace gadsel
