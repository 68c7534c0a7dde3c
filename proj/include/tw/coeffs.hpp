#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tw/expr.hpp"

namespace tw {

using Fn = std::function<double(double)>;

// A coefficient defined piecewise on [0,1]; pieces are contiguous and
// ascending. A point on a boundary belongs to the piece on its left,
// except 0 which belongs to the first piece.
class Piecewise {
  public:
    struct Piece {
        double lo, hi;
        Expr expr;
    };

    Piecewise() = default;
    explicit Piecewise(Expr single, double lo = 0.0, double hi = 1.0);
    explicit Piecewise(std::vector<Piece> pieces);

    bool valid() const { return !pieces_.empty(); }
    double lo() const { return pieces_.front().lo; }
    double hi() const { return pieces_.back().hi; }
    const std::vector<Piece>& pieces() const { return pieces_; }

    double operator()(double x) const;
    std::optional<double> try_eval(double x) const;
    Piecewise derivative() const;

  private:
    std::vector<Piece> pieces_;
};

struct ValidationIssue {
    std::string assumption;  // which structural requirement failed
    std::string message;
    double witness;          // a point exhibiting the failure, or NaN
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
};

// Sup of a difference quotient (F(x)-F(x0))/(x-x0) over an interval.
struct SupResult {
    double value = 0.0;
    bool infinite = false;
};

// One-sided Dini derivative estimate at a point.
struct DiniResult {
    double value = 0.0;
    bool plus_infinite = false;
    bool minus_infinite = false;
};

enum class Side { Left, Right };
enum class DiniKind { Upper, Lower };

struct GrowthFlags {
    bool g_sublinear_left = false;    // |g| <= L|phi-gamma| to the left of gamma
    bool g_sublinear_right = false;   // same to the right
    bool integrability = false;       // |g| >= L|phi-gamma|^tau near gamma, tau < 1
    double tau = 0.0;                 // measured growth exponent at gamma
    double L = 0.0;                   // measured lower-bound constant
};

// The problem data: convection flux f (optional; its derivative h may be
// supplied directly), diffusivity D, reaction g, and the two interior
// points alpha (sign change of D) and gamma (sign change of g).
struct CoefficientSet {
    std::optional<Piecewise> f;
    Piecewise D, g, h;
    Piecewise Ddot;   // derivative of D, built at construction
    double alpha = 0.0, gamma = 0.0;
    int grid = 2048;

    double q(double phi) const { return D(phi) * g(phi); }

    // Antiderivative of h with flux(0)=0; uses f when supplied.
    double flux(double phi) const;

    ValidationReport validate() const;
};

// Builds the derived fields (h from f if absent, Ddot) and checks basic
// well-formedness; throws std::invalid_argument on structural problems.
CoefficientSet make_coefficient_set(std::optional<Piecewise> f,
                                    Piecewise D, Piecewise g,
                                    std::optional<Piecewise> h,
                                    double alpha, double gamma,
                                    int grid = 2048);

// sup over x in (a,b) setminus {x0} of (F(x)-F(x0))/(x-x0), estimated on a
// uniform n-point grid plus geometric approach points toward each open
// endpoint; monotone under grid refinement.
SupResult difference_quotient_sup(const Fn& F, double x0, double Fx0,
                                  double a, double b, int n,
                                  bool include_a = false, bool include_b = false);

// One-sided upper/lower Dini derivative at x0 via geometrically shrinking
// steps h0 * 2^-k.
DiniResult dini_estimate(const Fn& F, double x0, Side side, DiniKind kind,
                         double h0 = 0.1, double lo = 0.0, double hi = 1.0);

// Least-squares fit |F(x)| ~ A |x - x0|^r for x on one side of x0 with
// |x - x0| in [smin, smax], log-spaced sample points; residual is the RMS
// misfit in log space.
struct PowerFit {
    double A = 0.0, r = 0.0, residual = 0.0;
    bool ok = false;
};
PowerFit fit_power(const Fn& F, double x0, Side side,
                   double smin, double smax, int npts = 25);

}  // namespace tw
