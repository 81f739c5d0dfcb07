#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "tspmp/errors.hpp"

namespace tspmp {

enum class VarKind { State, Control, Time, Param, InitState, FinalState };

struct EvalContext {
  const Eigen::VectorXd* state = nullptr;
  const Eigen::VectorXd* control = nullptr;
  double time = 0.0;
  const Eigen::VectorXd* param = nullptr;
  const Eigen::VectorXd* init_state = nullptr;
  const Eigen::VectorXd* final_state = nullptr;
};

/// Immutable scalar expression over (state, control, time, param) with exact
/// symbolic differentiation. The operation set keeps every expression C^1 in
/// the non-time variables.
class Expr {
 public:
  enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sin, Cos };

  Expr();  // zero
  static Expr constant(double c);
  static Expr var(VarKind kind, int index = 0);

  double eval(const EvalContext& ctx) const;
  Expr diff(VarKind kind, int index) const;
  bool depends_on(VarKind kind) const;
  bool is_constant(double* value = nullptr) const;

  Op op() const;
  double constant_value() const;
  VarKind var_kind() const;
  int var_index() const;
  int exponent() const;
  const std::vector<Expr>& args() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Op op, std::vector<Expr> args, double c = 0.0, VarKind vk = VarKind::Time,
                   int idx = 0, int exp = 0);
  std::shared_ptr<const Node> node_;
};

Expr pow_int(const Expr& base, int exponent);
Expr exp(const Expr& x);
Expr log(const Expr& x);
Expr sin(const Expr& x);
Expr cos(const Expr& x);

inline Expr state(int i) { return Expr::var(VarKind::State, i); }
inline Expr control(int i) { return Expr::var(VarKind::Control, i); }
inline Expr time_var() { return Expr::var(VarKind::Time); }
inline Expr param(int i) { return Expr::var(VarKind::Param, i); }
inline Expr init_state(int i) { return Expr::var(VarKind::InitState, i); }
inline Expr final_state(int i) { return Expr::var(VarKind::FinalState, i); }
inline Expr lit(double c) { return Expr::constant(c); }

/// Vector field f(q,u,t[,param]) with cached symbolic Jacobians.
class VectorField {
 public:
  VectorField() = default;
  VectorField(int state_dim, int control_dim, int param_dim, std::vector<Expr> rows);

  int state_dim() const { return n_; }
  int control_dim() const { return m_; }
  int param_dim() const { return p_; }
  const std::vector<Expr>& rows() const { return rows_; }

  Eigen::VectorXd eval(const Eigen::VectorXd& q, const Eigen::VectorXd& u, double t,
                       const Eigen::VectorXd* param = nullptr) const;
  Eigen::MatrixXd jac_state(const Eigen::VectorXd& q, const Eigen::VectorXd& u, double t,
                            const Eigen::VectorXd* param = nullptr) const;
  Eigen::MatrixXd jac_control(const Eigen::VectorXd& q, const Eigen::VectorXd& u, double t,
                              const Eigen::VectorXd* param = nullptr) const;
  Eigen::MatrixXd jac_param(const Eigen::VectorXd& q, const Eigen::VectorXd& u, double t,
                            const Eigen::VectorXd* param = nullptr) const;
  bool autonomous() const;

 private:
  int n_ = 0, m_ = 0, p_ = 0;
  std::vector<Expr> rows_;
  std::vector<std::vector<Expr>> dq_, du_, dp_;
};

/// Scalar field (running cost) with cached symbolic gradients.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(int state_dim, int control_dim, int param_dim, Expr body);

  const Expr& body() const { return body_; }
  double eval(const Eigen::VectorXd& q, const Eigen::VectorXd& u, double t,
              const Eigen::VectorXd* param = nullptr) const;
  Eigen::VectorXd grad_state(const Eigen::VectorXd& q, const Eigen::VectorXd& u, double t,
                             const Eigen::VectorXd* param = nullptr) const;
  Eigen::VectorXd grad_control(const Eigen::VectorXd& q, const Eigen::VectorXd& u, double t,
                               const Eigen::VectorXd* param = nullptr) const;
  Eigen::VectorXd grad_param(const Eigen::VectorXd& q, const Eigen::VectorXd& u, double t,
                             const Eigen::VectorXd* param = nullptr) const;
  bool autonomous() const { return !body_.depends_on(VarKind::Time); }
  int state_dim() const { return n_; }
  int control_dim() const { return m_; }
  int param_dim() const { return p_; }

 private:
  int n_ = 0, m_ = 0, p_ = 0;
  Expr body_;
  std::vector<Expr> dq_, du_, dp_;
};

/// Boundary map g(q(a), q(b)[, param]) with cached Jacobians.
class BoundaryMap {
 public:
  BoundaryMap() = default;
  BoundaryMap(int out_dim, int state_dim, int param_dim, std::vector<Expr> rows);

  int out_dim() const { return j_; }
  int state_dim() const { return n_; }
  const std::vector<Expr>& rows() const { return rows_; }

  Eigen::VectorXd eval(const Eigen::VectorXd& qa, const Eigen::VectorXd& qb,
                       const Eigen::VectorXd* param = nullptr) const;
  Eigen::MatrixXd jac_init(const Eigen::VectorXd& qa, const Eigen::VectorXd& qb,
                           const Eigen::VectorXd* param = nullptr) const;
  Eigen::MatrixXd jac_final(const Eigen::VectorXd& qa, const Eigen::VectorXd& qb,
                            const Eigen::VectorXd* param = nullptr) const;
  Eigen::MatrixXd jac_param(const Eigen::VectorXd& qa, const Eigen::VectorXd& qb,
                            const Eigen::VectorXd* param = nullptr) const;

 private:
  int j_ = 0, n_ = 0, p_ = 0;
  std::vector<Expr> rows_;
  std::vector<std::vector<Expr>> dqa_, dqb_, dp_;
};

/// Rows of A*q + B*u as expressions.
std::vector<Expr> linear_rows(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace tspmp
