#include "egns/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <array>
#include <mutex>
#include <string>

namespace egns {

namespace {

// Symmetric orbits of Dunavant-type rules. Weights sum to 1.
class RuleBuilder {
 public:
  explicit RuleBuilder(int degree) { rule_.degree = degree; }

  RuleBuilder& centroid(double w) {
    add(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, w);
    return *this;
  }
  // (a, a, 1-2a) and its rotations
  RuleBuilder& orbit3(double a, double w) {
    const double c = 1.0 - 2.0 * a;
    add(a, a, c, w);
    add(a, c, a, w);
    add(c, a, a, w);
    return *this;
  }
  // all permutations of (a, b, 1-a-b)
  RuleBuilder& orbit6(double a, double b, double w) {
    const double c = 1.0 - a - b;
    add(a, b, c, w);
    add(a, c, b, w);
    add(b, a, c, w);
    add(b, c, a, w);
    add(c, a, b, w);
    add(c, b, a, w);
    return *this;
  }
  QuadratureRule build() { return std::move(rule_); }

 private:
  void add(double l0, double l1, double l2, double w) {
    rule_.points.emplace_back(l0, l1, l2);
    rule_.weights.push_back(w);
  }
  QuadratureRule rule_;
};

std::array<QuadratureRule, kMaxQuadratureDegree + 1> make_rules() {
  std::array<QuadratureRule, kMaxQuadratureDegree + 1> r;
  r[1] = RuleBuilder(1).centroid(1.0).build();
  r[2] = RuleBuilder(2).orbit3(1.0 / 6.0, 1.0 / 3.0).build();
  r[3] = RuleBuilder(3).centroid(-9.0 / 16.0).orbit3(0.2, 25.0 / 48.0).build();
  r[4] = RuleBuilder(4)
             .orbit3(0.44594849091596488631832925388305, 0.22338158967801146569500700843312)
             .orbit3(0.09157621350977074345957146340220, 0.10995174365532186763832632490021)
             .build();
  r[5] = RuleBuilder(5)
             .centroid(0.225)
             .orbit3(0.47014206410511508977044120951345, 0.13239415278850618073764938783315)
             .orbit3(0.10128650732345633880098736191512, 0.12593918054482715259568394550018)
             .build();
  r[6] = RuleBuilder(6)
             .orbit3(0.24928674517091042129163855310702, 0.11678627572637936602528961138558)
             .orbit3(0.06308901449150222834033160287082, 0.05084490637020681692093680910686)
             .orbit6(0.31035245103378440541660773395655, 0.63650249912139864723014259441205,
                     0.08285107561837357519355345642044)
             .build();
  r[8] = RuleBuilder(8)
             .centroid(0.14431560767778716825109111048906)
             .orbit3(0.17056930775176020662229350149146, 0.10321737053471825028179155029212)
             .orbit3(0.05054722831703097545842355059660, 0.03245849762319808031092592834178)
             .orbit3(0.45929258829272315602881551449417, 0.09509163426728462479389610438858)
             .orbit6(0.26311282963463811342178578628464, 0.72849239295540428124100037917606,
                     0.02723031417443499426484469007390)
             .build();
  r[9] = RuleBuilder(9)
             .centroid(0.09713579628279609890744676309485)
             .orbit3(0.48968251919873762778370692483619, 0.03133470022713983234393199080984)
             .orbit3(0.43708959149293663726993036443535, 0.07782754100477543338465495857972)
             .orbit3(0.18820353561903273024096128046733, 0.07964773892720910288013526957424)
             .orbit3(0.04472951339445297061024247196780, 0.02557767565869810438673914467637)
             .orbit6(0.22196298916076569567510252769319, 0.74119859878449802069007987352342,
                     0.04328353937728937728937728937729)
             .build();
  // Published 15-digit values polished to full precision by Newton iteration
  // on the degree-10 moment equations.
  r[10] = RuleBuilder(10)
              .centroid(0.0908179903827535800952866)
              .orbit3(0.4855776333836573773675075, 0.03672595775646670471700607)
              .orbit3(0.1094815754850370547954586, 0.04532105943552793478260564)
              .orbit6(0.1417072194148799547566833, 0.307939838764120950165155,
                      0.07275791684542010860431518)
              .orbit6(0.02500353476268638607398848, 0.2466725606399026939172765,
                      0.02832724253105748483673706)
              .orbit6(0.00954081540029945758015281, 0.06680325101220026577354021,
                      0.009421666963732823459927471)
              .build();
  // The published 13-point degree-7 rule is accurate only to about 1e-13.
  r[7] = r[8];
  return r;
}

template <int N>
LineRule make_gauss() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  LineRule rule;
  // Boost stores the nonnegative half of the symmetric rule on [-1, 1].
  for (std::size_t i = x.size(); i-- > 0;) {
    if (x[i] == 0.0) continue;
    rule.points.push_back(0.5 * (1.0 - x[i]));
    rule.weights.push_back(0.5 * w[i]);
  }
  if (N % 2 == 1) {
    rule.points.push_back(0.5);
    rule.weights.push_back(0.5 * w[0]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    rule.points.push_back(0.5 * (1.0 + x[i]));
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}

}  // namespace

const QuadratureRule& quadrature_rule(int degree) {
  static const auto rules = make_rules();
  if (degree < 1 || degree > kMaxQuadratureDegree) {
    throw ConfigError("unsupported triangle quadrature degree " + std::to_string(degree) +
                      "; supported degrees are 1..10");
  }
  return rules[static_cast<std::size_t>(degree)];
}

const LineRule& gauss_line(int n) {
  static const std::array<LineRule, 11> rules = {
      LineRule{},           make_gauss<1>(), make_gauss<2>(), make_gauss<3>(),
      make_gauss<4>(),      make_gauss<5>(), make_gauss<6>(), make_gauss<7>(),
      make_gauss<8>(),      make_gauss<9>(), make_gauss<10>()};
  if (n < 1 || n > 10) {
    throw ConfigError("unsupported Gauss-Legendre point count " + std::to_string(n) +
                      "; supported counts are 1..10");
  }
  return rules[static_cast<std::size_t>(n)];
}

}  // namespace egns
