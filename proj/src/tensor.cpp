#include "gadsel/tensor.hpp"

#include <cmath>
#include <cstring>

#include "gadsel/errors.hpp"

namespace gadsel {

Parameter glorot_parameter(std::size_t rows, std::size_t cols, Rng& rng) {
    Parameter p;
    p.shape = {rows, cols};
    double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
    p.values.resize(rows * cols);
    for (auto& v : p.values) v = rng.uniform(-bound, bound);
    p.grad.assign(rows * cols, 0.0);
    p.adam_m.assign(rows * cols, 0.0);
    p.adam_v.assign(rows * cols, 0.0);
    return p;
}

Shape Tensor::shape() const { return tape_->nodes_[idx_].shape; }

std::span<const double> Tensor::values() const {
    return tape_->nodes_[idx_].value;
}

double Tensor::value(std::size_t r, std::size_t c) const {
    const auto& n = tape_->nodes_[idx_];
    return n.value[r * n.shape.cols + c];
}

double Tensor::scalar() const {
    const auto& n = tape_->nodes_[idx_];
    if (n.shape.count() != 1)
        throw ContractError("scalar() on a non-scalar tensor");
    return n.value[0];
}

#ifndef NDEBUG
Tape::Tape() : finite_checks_(true) {}
#else
Tape::Tape() : finite_checks_(false) {}
#endif

Tensor Tape::push(Node&& n) {
    if (finite_checks_) check_finite(n);
    nodes_.push_back(std::move(n));
    return Tensor(this, nodes_.size() - 1);
}

void Tape::check_finite(const Node& n) const {
    for (double v : n.value)
        if (!std::isfinite(v))
            throw NumericalError("non-finite value in forward pass");
}

Tensor Tape::constant(Shape shape, std::vector<double> values) {
    if (values.size() != shape.count())
        throw ShapeError("constant data does not match shape");
    Node n;
    n.op = Op::constant;
    n.shape = shape;
    n.value = std::move(values);
    return push(std::move(n));
}

Tensor Tape::constant(Shape shape, const double* values) {
    return constant(shape,
                    std::vector<double>(values, values + shape.count()));
}

Tensor Tape::leaf(Parameter& p) {
    Node n;
    n.op = Op::leaf;
    n.shape = p.shape;
    n.param = &p;
    n.needs_grad = true;
    n.value = p.values;
    return push(std::move(n));
}

Tensor Tape::matmul(Tensor a, Tensor b) {
    const auto& na = nodes_[a.idx_];
    const auto& nb = nodes_[b.idx_];
    if (na.shape.cols != nb.shape.rows)
        throw ShapeError("matmul: inner dimensions disagree");
    Node n;
    n.op = Op::matmul;
    n.shape = {na.shape.rows, nb.shape.cols};
    n.a = a.idx_;
    n.b = b.idx_;
    n.needs_grad = na.needs_grad || nb.needs_grad;
    n.value.resize(n.shape.count());
    kernels::mm_nn(na.value.data(), nb.value.data(), n.value.data(),
                   na.shape.rows, na.shape.cols, nb.shape.cols);
    return push(std::move(n));
}

Tensor Tape::matmul_nt(Tensor a, Tensor b) {
    const auto& na = nodes_[a.idx_];
    const auto& nb = nodes_[b.idx_];
    if (na.shape.cols != nb.shape.cols)
        throw ShapeError("matmul_nt: inner dimensions disagree");
    Node n;
    n.op = Op::matmul_nt;
    n.shape = {na.shape.rows, nb.shape.rows};
    n.a = a.idx_;
    n.b = b.idx_;
    n.needs_grad = na.needs_grad || nb.needs_grad;
    n.value.resize(n.shape.count());
    kernels::mm_nt(na.value.data(), nb.value.data(), n.value.data(),
                   na.shape.rows, na.shape.cols, nb.shape.rows);
    return push(std::move(n));
}

Tensor Tape::spmm(const kernels::Csr& s, Tensor x) {
    const auto& nx = nodes_[x.idx_];
    if (s.cols != nx.shape.rows)
        throw ShapeError("spmm: inner dimensions disagree");
    Node n;
    n.op = Op::spmm;
    n.shape = {s.rows, nx.shape.cols};
    n.a = x.idx_;
    n.csr = &s;
    n.needs_grad = nx.needs_grad;
    n.value.resize(n.shape.count());
    kernels::spmm(s, nx.value.data(), n.value.data(), nx.shape.cols);
    return push(std::move(n));
}

Tensor Tape::add(Tensor a, Tensor b) {
    const auto& na = nodes_[a.idx_];
    const auto& nb = nodes_[b.idx_];
    if (!(na.shape == nb.shape)) throw ShapeError("add: shape mismatch");
    Node n;
    n.op = Op::add;
    n.shape = na.shape;
    n.a = a.idx_;
    n.b = b.idx_;
    n.needs_grad = na.needs_grad || nb.needs_grad;
    n.value.resize(n.shape.count());
    for (std::size_t i = 0; i < n.value.size(); ++i)
        n.value[i] = na.value[i] + nb.value[i];
    return push(std::move(n));
}

Tensor Tape::sub(Tensor a, Tensor b) {
    const auto& na = nodes_[a.idx_];
    const auto& nb = nodes_[b.idx_];
    if (!(na.shape == nb.shape)) throw ShapeError("sub: shape mismatch");
    Node n;
    n.op = Op::sub;
    n.shape = na.shape;
    n.a = a.idx_;
    n.b = b.idx_;
    n.needs_grad = na.needs_grad || nb.needs_grad;
    n.value.resize(n.shape.count());
    for (std::size_t i = 0; i < n.value.size(); ++i)
        n.value[i] = na.value[i] - nb.value[i];
    return push(std::move(n));
}

Tensor Tape::scale(Tensor a, double c) {
    const auto& na = nodes_[a.idx_];
    Node n;
    n.op = Op::scale;
    n.shape = na.shape;
    n.a = a.idx_;
    n.c0 = c;
    n.needs_grad = na.needs_grad;
    n.value.resize(n.shape.count());
    for (std::size_t i = 0; i < n.value.size(); ++i)
        n.value[i] = c * na.value[i];
    return push(std::move(n));
}

Tensor Tape::relu(Tensor a) {
    const auto& na = nodes_[a.idx_];
    Node n;
    n.op = Op::relu;
    n.shape = na.shape;
    n.a = a.idx_;
    n.needs_grad = na.needs_grad;
    n.value.resize(n.shape.count());
    for (std::size_t i = 0; i < n.value.size(); ++i)
        n.value[i] = na.value[i] > 0 ? na.value[i] : 0.0;
    return push(std::move(n));
}

Tensor Tape::sigmoid(Tensor a) {
    const auto& na = nodes_[a.idx_];
    Node n;
    n.op = Op::sigmoid;
    n.shape = na.shape;
    n.a = a.idx_;
    n.needs_grad = na.needs_grad;
    n.value.resize(n.shape.count());
    for (std::size_t i = 0; i < n.value.size(); ++i) {
        double x = na.value[i];
        if (x >= 0) {
            n.value[i] = 1.0 / (1.0 + std::exp(-x));
        } else {
            double e = std::exp(x);
            n.value[i] = e / (1.0 + e);
        }
    }
    return push(std::move(n));
}

Tensor Tape::softplus(Tensor a) {
    const auto& na = nodes_[a.idx_];
    Node n;
    n.op = Op::softplus;
    n.shape = na.shape;
    n.a = a.idx_;
    n.needs_grad = na.needs_grad;
    n.value.resize(n.shape.count());
    for (std::size_t i = 0; i < n.value.size(); ++i) {
        double x = na.value[i];
        n.value[i] = std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
    }
    return push(std::move(n));
}

Tensor Tape::row_l2_norm(Tensor a) {
    const auto& na = nodes_[a.idx_];
    Node n;
    n.op = Op::row_l2_norm;
    n.shape = {na.shape.rows, 1};
    n.a = a.idx_;
    n.needs_grad = na.needs_grad;
    n.value.resize(na.shape.rows);
    for (std::size_t r = 0; r < na.shape.rows; ++r) {
        double acc = 0.0;
        const double* row = na.value.data() + r * na.shape.cols;
        for (std::size_t j = 0; j < na.shape.cols; ++j)
            acc += row[j] * row[j];
        n.value[r] = std::sqrt(acc);
    }
    return push(std::move(n));
}

Tensor Tape::mean_over_rows(Tensor a) {
    const auto& na = nodes_[a.idx_];
    if (na.shape.rows == 0) throw ShapeError("mean_over_rows: empty tensor");
    Node n;
    n.op = Op::mean_over_rows;
    n.shape = {1, na.shape.cols};
    n.a = a.idx_;
    n.needs_grad = na.needs_grad;
    n.value.assign(na.shape.cols, 0.0);
    for (std::size_t r = 0; r < na.shape.rows; ++r)
        for (std::size_t j = 0; j < na.shape.cols; ++j)
            n.value[j] += na.value[r * na.shape.cols + j];
    for (auto& v : n.value) v /= static_cast<double>(na.shape.rows);
    return push(std::move(n));
}

Tensor Tape::row(Tensor a, std::size_t i) {
    const auto& na = nodes_[a.idx_];
    if (i >= na.shape.rows) throw ShapeError("row: index out of range");
    Node n;
    n.op = Op::row;
    n.shape = {1, na.shape.cols};
    n.a = a.idx_;
    n.c0 = static_cast<double>(i);
    n.needs_grad = na.needs_grad;
    n.value.assign(na.value.begin() + i * na.shape.cols,
                   na.value.begin() + (i + 1) * na.shape.cols);
    return push(std::move(n));
}

Tensor Tape::frobenius_sq(Tensor a) {
    const auto& na = nodes_[a.idx_];
    Node n;
    n.op = Op::frobenius_sq;
    n.shape = {1, 1};
    n.a = a.idx_;
    n.needs_grad = na.needs_grad;
    double acc = 0.0;
    for (double v : na.value) acc += v * v;
    n.value = {acc};
    return push(std::move(n));
}

Tensor Tape::mean(Tensor a) {
    const auto& na = nodes_[a.idx_];
    if (na.shape.count() == 0) throw ShapeError("mean: empty tensor");
    Node n;
    n.op = Op::mean;
    n.shape = {1, 1};
    n.a = a.idx_;
    n.needs_grad = na.needs_grad;
    double acc = 0.0;
    for (double v : na.value) acc += v;
    n.value = {acc / static_cast<double>(na.shape.count())};
    return push(std::move(n));
}

void Tape::backward(Tensor loss) {
    if (loss.tape_ != this) throw ContractError("loss from another tape");
    Node& ln = nodes_[loss.idx_];
    if (ln.shape.count() != 1)
        throw ContractError("backward on a non-scalar tensor");
    for (auto& n : nodes_)
        if (n.needs_grad) n.grad.assign(n.shape.count(), 0.0);
    if (!ln.needs_grad) return;  // loss does not depend on any parameter
    ln.grad[0] = 1.0;

    for (std::size_t pos = loss.idx_ + 1; pos-- > 0;) {
        Node& n = nodes_[pos];
        if (!n.needs_grad || n.grad.empty()) continue;
        switch (n.op) {
            case Op::constant:
            case Op::leaf:
                break;
            case Op::matmul: {
                Node& na = nodes_[n.a];
                Node& nb = nodes_[n.b];
                if (na.needs_grad) {
                    // dA += dC * B^T
                    std::vector<double> tmp(na.shape.count());
                    kernels::mm_nt(n.grad.data(), nb.value.data(), tmp.data(),
                                   n.shape.rows, n.shape.cols, nb.shape.rows);
                    for (std::size_t i = 0; i < tmp.size(); ++i)
                        na.grad[i] += tmp[i];
                }
                if (nb.needs_grad) {
                    // dB += A^T * dC
                    std::vector<double> tmp(nb.shape.count());
                    kernels::mm_tn(na.value.data(), n.grad.data(), tmp.data(),
                                   na.shape.cols, na.shape.rows, n.shape.cols);
                    for (std::size_t i = 0; i < tmp.size(); ++i)
                        nb.grad[i] += tmp[i];
                }
                break;
            }
            case Op::matmul_nt: {
                Node& na = nodes_[n.a];
                Node& nb = nodes_[n.b];
                if (na.needs_grad) {
                    // dA += dC * B
                    std::vector<double> tmp(na.shape.count());
                    kernels::mm_nn(n.grad.data(), nb.value.data(), tmp.data(),
                                   n.shape.rows, n.shape.cols, nb.shape.cols);
                    for (std::size_t i = 0; i < tmp.size(); ++i)
                        na.grad[i] += tmp[i];
                }
                if (nb.needs_grad) {
                    // dB += dC^T * A
                    std::vector<double> tmp(nb.shape.count());
                    kernels::mm_tn(n.grad.data(), na.value.data(), tmp.data(),
                                   n.shape.cols, n.shape.rows, na.shape.cols);
                    for (std::size_t i = 0; i < tmp.size(); ++i)
                        nb.grad[i] += tmp[i];
                }
                break;
            }
            case Op::spmm: {
                Node& nx = nodes_[n.a];
                if (nx.needs_grad) {
                    // The CSR operators used here are symmetric, so
                    // S^T * dC = S * dC.
                    std::vector<double> tmp(nx.shape.count());
                    kernels::spmm(*n.csr, n.grad.data(), tmp.data(),
                                  n.shape.cols);
                    for (std::size_t i = 0; i < tmp.size(); ++i)
                        nx.grad[i] += tmp[i];
                }
                break;
            }
            case Op::add: {
                Node& na = nodes_[n.a];
                Node& nb = nodes_[n.b];
                if (na.needs_grad)
                    for (std::size_t i = 0; i < n.grad.size(); ++i)
                        na.grad[i] += n.grad[i];
                if (nb.needs_grad)
                    for (std::size_t i = 0; i < n.grad.size(); ++i)
                        nb.grad[i] += n.grad[i];
                break;
            }
            case Op::sub: {
                Node& na = nodes_[n.a];
                Node& nb = nodes_[n.b];
                if (na.needs_grad)
                    for (std::size_t i = 0; i < n.grad.size(); ++i)
                        na.grad[i] += n.grad[i];
                if (nb.needs_grad)
                    for (std::size_t i = 0; i < n.grad.size(); ++i)
                        nb.grad[i] -= n.grad[i];
                break;
            }
            case Op::scale: {
                Node& na = nodes_[n.a];
                for (std::size_t i = 0; i < n.grad.size(); ++i)
                    na.grad[i] += n.c0 * n.grad[i];
                break;
            }
            case Op::relu: {
                Node& na = nodes_[n.a];
                for (std::size_t i = 0; i < n.grad.size(); ++i)
                    if (na.value[i] > 0) na.grad[i] += n.grad[i];
                break;
            }
            case Op::sigmoid: {
                Node& na = nodes_[n.a];
                for (std::size_t i = 0; i < n.grad.size(); ++i) {
                    double y = n.value[i];
                    na.grad[i] += n.grad[i] * y * (1.0 - y);
                }
                break;
            }
            case Op::softplus: {
                Node& na = nodes_[n.a];
                for (std::size_t i = 0; i < n.grad.size(); ++i) {
                    double x = na.value[i];
                    double sig = x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                                        : std::exp(x) / (1.0 + std::exp(x));
                    na.grad[i] += n.grad[i] * sig;
                }
                break;
            }
            case Op::row_l2_norm: {
                Node& na = nodes_[n.a];
                for (std::size_t r = 0; r < na.shape.rows; ++r) {
                    double y = n.value[r];
                    if (y <= 0) continue;  // subgradient 0 at the origin
                    double g = n.grad[r] / y;
                    for (std::size_t j = 0; j < na.shape.cols; ++j)
                        na.grad[r * na.shape.cols + j] +=
                            g * na.value[r * na.shape.cols + j];
                }
                break;
            }
            case Op::mean_over_rows: {
                Node& na = nodes_[n.a];
                double inv = 1.0 / static_cast<double>(na.shape.rows);
                for (std::size_t r = 0; r < na.shape.rows; ++r)
                    for (std::size_t j = 0; j < na.shape.cols; ++j)
                        na.grad[r * na.shape.cols + j] += inv * n.grad[j];
                break;
            }
            case Op::row: {
                Node& na = nodes_[n.a];
                auto i = static_cast<std::size_t>(n.c0);
                for (std::size_t j = 0; j < na.shape.cols; ++j)
                    na.grad[i * na.shape.cols + j] += n.grad[j];
                break;
            }
            case Op::frobenius_sq: {
                Node& na = nodes_[n.a];
                double g = 2.0 * n.grad[0];
                for (std::size_t i = 0; i < na.value.size(); ++i)
                    na.grad[i] += g * na.value[i];
                break;
            }
            case Op::mean: {
                Node& na = nodes_[n.a];
                double g = n.grad[0] / static_cast<double>(na.shape.count());
                for (std::size_t i = 0; i < na.value.size(); ++i)
                    na.grad[i] += g;
                break;
            }
        }
    }

    for (Node& n : nodes_)
        if (n.op == Op::leaf && !n.grad.empty())
            for (std::size_t i = 0; i < n.grad.size(); ++i)
                n.param->grad[i] += n.grad[i];
}

void adam_step(const std::vector<Parameter*>& params, double lr, double beta1,
               double beta2, double eps) {
    for (Parameter* p : params) {
        for (double g : p->grad)
            if (!std::isfinite(g))
                throw NumericalError(
                    "training aborted: non-finite gradient in Adam step");
        ++p->step_count;
        double bc1 = 1.0 - std::pow(beta1, static_cast<double>(p->step_count));
        double bc2 = 1.0 - std::pow(beta2, static_cast<double>(p->step_count));
        for (std::size_t i = 0; i < p->values.size(); ++i) {
            double g = p->grad[i];
            p->adam_m[i] = beta1 * p->adam_m[i] + (1.0 - beta1) * g;
            p->adam_v[i] = beta2 * p->adam_v[i] + (1.0 - beta2) * g * g;
            double mhat = p->adam_m[i] / bc1;
            double vhat = p->adam_v[i] / bc2;
            p->values[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
        std::fill(p->grad.begin(), p->grad.end(), 0.0);
    }
}

}  // namespace gadsel
