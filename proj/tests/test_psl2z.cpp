#include <doctest.h>

#include <map>
#include <numbers>
#include <random>
#include <set>

#include "itershim/psl2z.hpp"

using namespace itershim;
using namespace itershim::psl2z;

namespace {

Mat2 random_matrix(std::mt19937_64& rng, int len) {
  std::uniform_int_distribution<int> pick(0, 2);
  Mat2 m;
  for (int i = 0; i < len; ++i) {
    int t = pick(rng);
    m = m * (t == 0 ? Mat2::sigma() : t == 1 ? Mat2::tau() : Mat2::translation(1));
  }
  return m;
}

}  // namespace

TEST_CASE("generators and eval_word") {
  CHECK(eval_word(GroupWord()) == Mat2::identity());
  CHECK(eval_word(GroupWord::parse("s")) == Mat2(0, -1, 1, 0));
  // sigma * tau = (-1 1; 0 -1) ~ (1 -1; 0 1), the translation z -> z - 1.
  CHECK(eval_word(GroupWord::parse("st")) == Mat2(1, -1, 0, 1));
  CHECK(Mat2::sigma() * Mat2::sigma() == Mat2::identity());
  CHECK(Mat2::tau() * Mat2::tau() * Mat2::tau() == Mat2::identity());
  CHECK_THROWS_AS(GroupWord::parse("ss"), std::invalid_argument);
  CHECK_THROWS_AS(GroupWord::parse("ttt"), std::invalid_argument);
  CHECK_THROWS_AS(GroupWord({Token::Tau, Token::TauSq}), std::invalid_argument);
  CHECK_THROWS_AS(Mat2(1, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("projective equality") {
  CHECK(Mat2(-1, 0, 0, -1) == Mat2::identity());
  CHECK(Mat2(0, 1, -1, 0) == Mat2::sigma());
  CHECK(Mat2(0, 1, -1, 0).b() == 1);
}

TEST_CASE("word length and serialization") {
  auto w = GroupWord::parse("sttst");
  CHECK(w.tokens().size() == 4);
  CHECK(w.length() == 5);
  CHECK(w.to_string() == "sttst");
  CHECK(GroupWord().length() == 0);
}

TEST_CASE("normal_form matches brute-force enumeration") {
  CHECK(normal_form(Mat2::identity()).empty());
  CHECK(normal_form(Mat2::sigma()).to_string() == "s");

  std::map<std::string, GroupWord> by_matrix;
  for (const auto& w : enumerate_words(4)) by_matrix.emplace(eval_word(w).to_string(), w);
  Mat2 t1(1, 1, 0, 1);
  auto found = by_matrix.find(t1.to_string());
  REQUIRE(found != by_matrix.end());
  CHECK(normal_form(t1) == found->second);
  CHECK(found->second.to_string() == "tts");
}

TEST_CASE("normal_form is idempotent on reduced words and sound on random products") {
  for (const auto& w : enumerate_words(8)) CHECK(normal_form(eval_word(w)) == w);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    Mat2 m = random_matrix(rng, 15);
    CHECK(eval_word(normal_form(m)) == m);
  }
}

TEST_CASE("normal-form words of length <= 6 are pairwise distinct in PSL(2,Z)") {
  std::set<std::string> seen;
  auto words = enumerate_words(6);
  for (const auto& w : words) seen.insert(eval_word(w).to_string());
  CHECK(seen.size() == words.size());
}

TEST_CASE("reduce_tokens performs free-product cancellation") {
  CHECK(reduce_tokens({Token::Sigma, Token::Sigma}).empty());
  CHECK(reduce_tokens({Token::Tau, Token::TauSq}).empty());
  CHECK(reduce_tokens({Token::Tau, Token::Tau}).to_string() == "tt");
  CHECK(reduce_tokens({Token::Sigma, Token::Tau, Token::TauSq, Token::Sigma, Token::Tau}).to_string() == "t");
}

TEST_CASE("group elements compose consistently") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    auto g = GroupElement::from_matrix(random_matrix(rng, 6));
    auto h = GroupElement::from_matrix(random_matrix(rng, 6));
    auto gh = g * h;
    CHECK(gh.word == normal_form(gh.mat));
    CHECK((g * g.inverse()).word.empty());
  }
}

TEST_CASE("mobius action") {
  Complex i(0.0, 1.0);
  CHECK(std::abs(mobius(Mat2::sigma(), i) - i) < 1e-15);
  Complex rho = std::polar(1.0, std::numbers::pi / 3.0);
  CHECK(std::abs(mobius(Mat2::tau(), rho) - rho) < 1e-15);
  CHECK(mobius(Mat2::sigma(), Cusp(0, 1)) == Cusp::infinity());
  CHECK(mobius(Mat2::sigma(), Cusp::infinity()) == Cusp(0, 1));
  CHECK(Cusp(6, -10) == Cusp(-3, 5));

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> num(-30, 30), den(1, 30);
  for (int i = 0; i < 100; ++i) {
    Mat2 g = random_matrix(rng, 8), h = random_matrix(rng, 8);
    Cusp c(num(rng), den(rng));
    CHECK(mobius(g * h, c) == mobius(g, mobius(h, c)));
  }
}

TEST_CASE("convergents: hand examples") {
  auto zero = convergents(Rational(0));
  REQUIRE(zero.n() == 0);
  CHECK(zero.p == std::vector<Int>{1, 0});
  CHECK(zero.q == std::vector<Int>{0, 1});
  CHECK(zero.matrices[0] == Mat2(0, -1, 1, 0));

  auto c = convergents(Rational(3, 5));
  CHECK(c.partial_quotients == std::vector<Int>{0, 1, 1, 2});
  CHECK(c.p == std::vector<Int>{1, 0, 1, 1, 3});
  CHECK(c.q == std::vector<Int>{0, 1, 1, 2, 5});

  auto seven = convergents(Rational(7));
  CHECK(seven.p == std::vector<Int>{1, 7});
  CHECK(seven.q == std::vector<Int>{0, 1});
}

TEST_CASE("convergents: determinant identities for denominators <= 50") {
  for (int q = 1; q <= 50; ++q)
    for (int p = -60; p <= 60; ++p) {
      if (boost::multiprecision::gcd(Int(p), Int(q)) != 1) continue;
      auto c = convergents(Rational(p, q));
      CHECK(c.p.back() == p);
      CHECK(c.q.back() == q);
      for (int k = 0; k <= c.n(); ++k) {
        const Int& pk = c.p[k + 1];
        const Int& qk = c.q[k + 1];
        const Int& pk1 = c.p[k];
        const Int& qk1 = c.q[k];
        Int expected = (k % 2 == 1) ? 1 : -1;
        CHECK(pk * qk1 - pk1 * qk == expected);
        const Mat2& g = c.matrices[k];
        CHECK(g.a() * g.d() - g.b() * g.c() == 1);
        CHECK(mobius(g, Cusp::infinity()) == Cusp(pk, qk));
        CHECK(mobius(g, Cusp(0, 1)) == Cusp(pk1, qk1));
      }
    }
}

TEST_CASE("cusp stabilizers") {
  CHECK(cusp_stabilizer_generator(Cusp::infinity()).mat == Mat2::sigma() * Mat2::tau());
  CHECK(cusp_stabilizer_generator(Cusp(0, 1)).mat == Mat2::tau() * Mat2::sigma());
  for (auto c : {Cusp(3, 5), Cusp(-7, 4), Cusp(1, 1), Cusp(22, 7)}) {
    auto g = cusp_stabilizer_generator(c);
    CHECK(mobius(g.mat, c) == c);
    CHECK(g.word == normal_form(g.mat));
  }
}

TEST_CASE("parse_point") {
  CHECK(std::get<Cusp>(parse_point("inf")).is_infinity());
  CHECK(std::get<Cusp>(parse_point("3/5")) == Cusp(3, 5));
  CHECK(std::abs(std::get<Complex>(parse_point("i")) - Complex(0, 1)) == 0.0);
  CHECK_THROWS(parse_point("1,-1"));
}
