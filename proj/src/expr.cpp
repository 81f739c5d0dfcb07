#include "tspmp/expr.hpp"

#include <cmath>
#include <string>

namespace tspmp {

struct Expr::Node {
  Op op;
  double constant = 0.0;
  VarKind var = VarKind::Time;
  int index = 0;
  int exponent = 0;
  std::vector<Expr> args;
};

Expr::Expr() : Expr(make(Op::Const, {}, 0.0).node_) {}

Expr Expr::make(Op op, std::vector<Expr> args, double c, VarKind vk, int idx, int exp) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->constant = c;
  n->var = vk;
  n->index = idx;
  n->exponent = exp;
  n->args = std::move(args);
  return Expr(std::move(n));
}

Expr Expr::constant(double c) { return make(Op::Const, {}, c); }

Expr Expr::var(VarKind kind, int index) { return make(Op::Var, {}, 0.0, kind, index); }

Expr::Op Expr::op() const { return node_->op; }
double Expr::constant_value() const { return node_->constant; }
VarKind Expr::var_kind() const { return node_->var; }
int Expr::var_index() const { return node_->index; }
int Expr::exponent() const { return node_->exponent; }
const std::vector<Expr>& Expr::args() const { return node_->args; }

bool Expr::is_constant(double* value) const {
  if (node_->op != Op::Const) return false;
  if (value) *value = node_->constant;
  return true;
}

namespace {

double lookup(const EvalContext& ctx, VarKind kind, int index) {
  const Eigen::VectorXd* v = nullptr;
  switch (kind) {
    case VarKind::State: v = ctx.state; break;
    case VarKind::Control: v = ctx.control; break;
    case VarKind::Time: return ctx.time;
    case VarKind::Param: v = ctx.param; break;
    case VarKind::InitState: v = ctx.init_state; break;
    case VarKind::FinalState: v = ctx.final_state; break;
  }
  if (!v || index >= v->size()) fail(Err::DimensionMismatch, "expression variable out of range");
  return (*v)[index];
}

}  // namespace

double Expr::eval(const EvalContext& ctx) const {
  switch (node_->op) {
    case Op::Const: return node_->constant;
    case Op::Var: return lookup(ctx, node_->var, node_->index);
    case Op::Add: return node_->args[0].eval(ctx) + node_->args[1].eval(ctx);
    case Op::Sub: return node_->args[0].eval(ctx) - node_->args[1].eval(ctx);
    case Op::Mul: return node_->args[0].eval(ctx) * node_->args[1].eval(ctx);
    case Op::Div: return node_->args[0].eval(ctx) / node_->args[1].eval(ctx);
    case Op::Pow: return std::pow(node_->args[0].eval(ctx), node_->exponent);
    case Op::Neg: return -node_->args[0].eval(ctx);
    case Op::Exp: return std::exp(node_->args[0].eval(ctx));
    case Op::Log: return std::log(node_->args[0].eval(ctx));
    case Op::Sin: return std::sin(node_->args[0].eval(ctx));
    case Op::Cos: return std::cos(node_->args[0].eval(ctx));
  }
  return 0.0;
}

Expr operator+(const Expr& a, const Expr& b) {
  double ca, cb;
  bool fa = a.is_constant(&ca), fb = b.is_constant(&cb);
  if (fa && fb) return Expr::constant(ca + cb);
  if (fa && ca == 0.0) return b;
  if (fb && cb == 0.0) return a;
  return Expr::make(Expr::Op::Add, {a, b});
}

Expr operator-(const Expr& a, const Expr& b) {
  double ca, cb;
  bool fa = a.is_constant(&ca), fb = b.is_constant(&cb);
  if (fa && fb) return Expr::constant(ca - cb);
  if (fb && cb == 0.0) return a;
  if (fa && ca == 0.0) return -b;
  return Expr::make(Expr::Op::Sub, {a, b});
}

Expr operator*(const Expr& a, const Expr& b) {
  double ca, cb;
  bool fa = a.is_constant(&ca), fb = b.is_constant(&cb);
  if (fa && fb) return Expr::constant(ca * cb);
  if (fa && ca == 0.0) return Expr::constant(0.0);
  if (fb && cb == 0.0) return Expr::constant(0.0);
  if (fa && ca == 1.0) return b;
  if (fb && cb == 1.0) return a;
  return Expr::make(Expr::Op::Mul, {a, b});
}

Expr operator/(const Expr& a, const Expr& b) {
  double ca, cb;
  bool fa = a.is_constant(&ca), fb = b.is_constant(&cb);
  if (fb && cb == 0.0) fail(Err::ParseError, "division by constant zero");
  if (fa && fb) return Expr::constant(ca / cb);
  if (fa && ca == 0.0) return Expr::constant(0.0);
  if (fb && cb == 1.0) return a;
  return Expr::make(Expr::Op::Div, {a, b});
}

Expr operator-(const Expr& a) {
  double ca;
  if (a.is_constant(&ca)) return Expr::constant(-ca);
  return Expr::make(Expr::Op::Neg, {a});
}

Expr pow_int(const Expr& base, int exponent) {
  if (exponent == 0) return Expr::constant(1.0);
  if (exponent == 1) return base;
  double cb;
  if (base.is_constant(&cb)) return Expr::constant(std::pow(cb, exponent));
  return Expr::make(Expr::Op::Pow, {base}, 0.0, VarKind::Time, 0, exponent);
}

Expr exp(const Expr& x) {
  double c;
  if (x.is_constant(&c)) return Expr::constant(std::exp(c));
  return Expr::make(Expr::Op::Exp, {x});
}

Expr log(const Expr& x) {
  double c;
  if (x.is_constant(&c)) return Expr::constant(std::log(c));
  return Expr::make(Expr::Op::Log, {x});
}

Expr sin(const Expr& x) {
  double c;
  if (x.is_constant(&c)) return Expr::constant(std::sin(c));
  return Expr::make(Expr::Op::Sin, {x});
}

Expr cos(const Expr& x) {
  double c;
  if (x.is_constant(&c)) return Expr::constant(std::cos(c));
  return Expr::make(Expr::Op::Cos, {x});
}

Expr Expr::diff(VarKind kind, int index) const {
  switch (node_->op) {
    case Op::Const:
      return constant(0.0);
    case Op::Var:
      return (node_->var == kind && node_->index == index) ? constant(1.0) : constant(0.0);
    case Op::Add:
      return node_->args[0].diff(kind, index) + node_->args[1].diff(kind, index);
    case Op::Sub:
      return node_->args[0].diff(kind, index) - node_->args[1].diff(kind, index);
    case Op::Mul:
      return node_->args[0].diff(kind, index) * node_->args[1] +
             node_->args[0] * node_->args[1].diff(kind, index);
    case Op::Div: {
      const Expr& a = node_->args[0];
      const Expr& b = node_->args[1];
      return (a.diff(kind, index) * b - a * b.diff(kind, index)) / (b * b);
    }
    case Op::Pow: {
      const Expr& a = node_->args[0];
      return constant(node_->exponent) * pow_int(a, node_->exponent - 1) * a.diff(kind, index);
    }
    case Op::Neg:
      return -node_->args[0].diff(kind, index);
    case Op::Exp:
      return tspmp::exp(node_->args[0]) * node_->args[0].diff(kind, index);
    case Op::Log:
      return node_->args[0].diff(kind, index) / node_->args[0];
    case Op::Sin:
      return tspmp::cos(node_->args[0]) * node_->args[0].diff(kind, index);
    case Op::Cos:
      return -tspmp::sin(node_->args[0]) * node_->args[0].diff(kind, index);
  }
  return constant(0.0);
}

bool Expr::depends_on(VarKind kind) const {
  if (node_->op == Op::Var) return node_->var == kind;
  for (const Expr& a : node_->args) {
    if (a.depends_on(kind)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<Expr>> differentiate_rows(const std::vector<Expr>& rows, VarKind kind,
                                                  int count) {
  std::vector<std::vector<Expr>> out(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    out[r].reserve(static_cast<size_t>(count));
    for (int c = 0; c < count; ++c) out[r].push_back(rows[r].diff(kind, c));
  }
  return out;
}

Eigen::MatrixXd eval_rows(const std::vector<std::vector<Expr>>& d, const EvalContext& ctx) {
  Eigen::MatrixXd out(static_cast<int>(d.size()), d.empty() ? 0 : static_cast<int>(d[0].size()));
  for (size_t r = 0; r < d.size(); ++r) {
    for (size_t c = 0; c < d[r].size(); ++c) {
      out(static_cast<int>(r), static_cast<int>(c)) = d[r][c].eval(ctx);
    }
  }
  return out;
}

}  // namespace

VectorField::VectorField(int state_dim, int control_dim, int param_dim, std::vector<Expr> rows)
    : n_(state_dim), m_(control_dim), p_(param_dim), rows_(std::move(rows)) {
  if (static_cast<int>(rows_.size()) != n_) fail(Err::DimensionMismatch, "vector field rows");
  dq_ = differentiate_rows(rows_, VarKind::State, n_);
  du_ = differentiate_rows(rows_, VarKind::Control, m_);
  dp_ = differentiate_rows(rows_, VarKind::Param, p_);
}

Eigen::VectorXd VectorField::eval(const Eigen::VectorXd& q, const Eigen::VectorXd& u, double t,
                                  const Eigen::VectorXd* pr) const {
  EvalContext ctx{&q, &u, t, pr, nullptr, nullptr};
  Eigen::VectorXd out(n_);
  for (int r = 0; r < n_; ++r) out[r] = rows_[static_cast<size_t>(r)].eval(ctx);
  return out;
}

Eigen::MatrixXd VectorField::jac_state(const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                                       double t, const Eigen::VectorXd* pr) const {
  EvalContext ctx{&q, &u, t, pr, nullptr, nullptr};
  return eval_rows(dq_, ctx);
}

Eigen::MatrixXd VectorField::jac_control(const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                                         double t, const Eigen::VectorXd* pr) const {
  EvalContext ctx{&q, &u, t, pr, nullptr, nullptr};
  return eval_rows(du_, ctx);
}

Eigen::MatrixXd VectorField::jac_param(const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                                       double t, const Eigen::VectorXd* pr) const {
  EvalContext ctx{&q, &u, t, pr, nullptr, nullptr};
  return eval_rows(dp_, ctx);
}

bool VectorField::autonomous() const {
  for (const Expr& r : rows_) {
    if (r.depends_on(VarKind::Time)) return false;
  }
  return true;
}

ScalarField::ScalarField(int state_dim, int control_dim, int param_dim, Expr body)
    : n_(state_dim), m_(control_dim), p_(param_dim), body_(std::move(body)) {
  for (int i = 0; i < n_; ++i) dq_.push_back(body_.diff(VarKind::State, i));
  for (int i = 0; i < m_; ++i) du_.push_back(body_.diff(VarKind::Control, i));
  for (int i = 0; i < p_; ++i) dp_.push_back(body_.diff(VarKind::Param, i));
}

double ScalarField::eval(const Eigen::VectorXd& q, const Eigen::VectorXd& u, double t,
                         const Eigen::VectorXd* pr) const {
  EvalContext ctx{&q, &u, t, pr, nullptr, nullptr};
  return body_.eval(ctx);
}

namespace {

Eigen::VectorXd eval_list(const std::vector<Expr>& list, const EvalContext& ctx) {
  Eigen::VectorXd out(static_cast<int>(list.size()));
  for (size_t i = 0; i < list.size(); ++i) out[static_cast<int>(i)] = list[i].eval(ctx);
  return out;
}

}  // namespace

Eigen::VectorXd ScalarField::grad_state(const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                                        double t, const Eigen::VectorXd* pr) const {
  EvalContext ctx{&q, &u, t, pr, nullptr, nullptr};
  return eval_list(dq_, ctx);
}

Eigen::VectorXd ScalarField::grad_control(const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                                          double t, const Eigen::VectorXd* pr) const {
  EvalContext ctx{&q, &u, t, pr, nullptr, nullptr};
  return eval_list(du_, ctx);
}

Eigen::VectorXd ScalarField::grad_param(const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                                        double t, const Eigen::VectorXd* pr) const {
  EvalContext ctx{&q, &u, t, pr, nullptr, nullptr};
  return eval_list(dp_, ctx);
}

BoundaryMap::BoundaryMap(int out_dim, int state_dim, int param_dim, std::vector<Expr> rows)
    : j_(out_dim), n_(state_dim), p_(param_dim), rows_(std::move(rows)) {
  if (static_cast<int>(rows_.size()) != j_) fail(Err::DimensionMismatch, "boundary map rows");
  dqa_ = differentiate_rows(rows_, VarKind::InitState, n_);
  dqb_ = differentiate_rows(rows_, VarKind::FinalState, n_);
  dp_ = differentiate_rows(rows_, VarKind::Param, p_);
}

Eigen::VectorXd BoundaryMap::eval(const Eigen::VectorXd& qa, const Eigen::VectorXd& qb,
                                  const Eigen::VectorXd* pr) const {
  EvalContext ctx{nullptr, nullptr, 0.0, pr, &qa, &qb};
  Eigen::VectorXd out(j_);
  for (int r = 0; r < j_; ++r) out[r] = rows_[static_cast<size_t>(r)].eval(ctx);
  return out;
}

Eigen::MatrixXd BoundaryMap::jac_init(const Eigen::VectorXd& qa, const Eigen::VectorXd& qb,
                                      const Eigen::VectorXd* pr) const {
  EvalContext ctx{nullptr, nullptr, 0.0, pr, &qa, &qb};
  return eval_rows(dqa_, ctx);
}

Eigen::MatrixXd BoundaryMap::jac_final(const Eigen::VectorXd& qa, const Eigen::VectorXd& qb,
                                       const Eigen::VectorXd* pr) const {
  EvalContext ctx{nullptr, nullptr, 0.0, pr, &qa, &qb};
  return eval_rows(dqb_, ctx);
}

Eigen::MatrixXd BoundaryMap::jac_param(const Eigen::VectorXd& qa, const Eigen::VectorXd& qb,
                                       const Eigen::VectorXd* pr) const {
  EvalContext ctx{nullptr, nullptr, 0.0, pr, &qa, &qb};
  return eval_rows(dp_, ctx);
}

std::vector<Expr> linear_rows(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows()) fail(Err::DimensionMismatch, "linear_rows matrices");
  std::vector<Expr> rows;
  for (int r = 0; r < a.rows(); ++r) {
    Expr acc = Expr::constant(0.0);
    for (int c = 0; c < a.cols(); ++c) acc = acc + lit(a(r, c)) * state(c);
    for (int c = 0; c < b.cols(); ++c) acc = acc + lit(b(r, c)) * control(c);
    rows.push_back(acc);
  }
  return rows;
}

}  // namespace tspmp
