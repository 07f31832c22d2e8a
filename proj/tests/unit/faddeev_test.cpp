// Copyright 2026 The conformal-dbar Authors. All Rights Reserved.
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


#include "cdbar/faddeev.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"

namespace cdbar {
namespace {

// E1 reference values from a 40-digit quadrature of
// e^{-z} int_0^inf e^{-s} / (z + s) ds.
struct E1Case {
  double re, im, e1_re, e1_im;
};
const E1Case kE1Table[] = {
    {1.0, 0.0, 0.21938393439552027368, 0.0},
    {4.0, 0.0, 0.0037793524098489064789, 0.0},
    {-3.0, 0.001, -9.9338303388992157442, -3.1348974752353213055},
    {0.0, 10.0, 0.045456433004455372635, 0.0875512674239774301},
    {-25.0, 2.0, 1015104853.1731776425, 2818189675.6409544001},
    {0.004822536631500773, 0.029030364995711405, 2.9536129536765332657, -1.3772200496401182851},
    {5.344457077874719, 5.406745003661405, 0.00056730407133391902123, 0.000090843842876854505959},
    {3.4256810478150492, 4.20935383907844, 0.0014713576658360267871, 0.0051382588503363104593},
    {-0.03123302712118768, -0.0019264558423302887, 2.8556872523718701564, 3.0780337517605640209},
    {13.549404796741964, -2.3677644793207038, -7.27774636536947697e-8, 5.1001707208561243809e-8},
    {0.6472903845467863, 1.0514928251814075, -0.057893975185546460154, -0.28371833285401842593},
    {13.759575921479561, -16.296159316311893, -6.9883275577785957633e-9, -4.7584338141988569694e-8},
    {-0.2524750483964363, -0.2541678741861339, 0.19904318798240735219, 2.0648216464344309449},
    {1.2333516675210692, -1.7142126205193713, -0.082323889840276239149, 0.06796310350991127176},
    {-0.07336179775170032, -0.7776767480740944, -0.25011979027331268765, 0.88505038854210852409},
    {3.448730279167032, -0.5403519405852615, 0.0057721366083529236213, 0.0045701894382941485997},
    {0.4721749663690553, -1.0698971151211978, -0.11089207161505126473, 0.34880014007782637564},
    {-0.347529260370177, 5.162900700888147, 0.24958617818553365996, -0.088302938461415570013},
    {-0.07569765030364448, 0.1010919457808854, 1.4174732503688670241, -2.1085731800375827834},
    {-0.21170159240516104, 1.0134716108796917, -0.55206623019113264924, -0.71373514037646576926},
    {-0.5985808589181127, 13.293943199129572, -0.087504009951317075723, -0.10421268138917673148},
    {0.37587776918906685, -0.060337777398722287, 0.73257682554737355817, 0.10888165509406395094},
    {-0.10106568222428476, -0.12468680832150113, 1.1527080494062612484, 2.1208518111075254807},
    {-0.0027200006655725287, 0.04864910539683969, 2.4422164824876368002, -1.5779398579557821871},
    {1.409594272989762, 1.446586867132083, -0.043045053768140680457, -0.08035759746896602329},
    {0.4930284464114716, 0.3421565958852883, 0.3928697421127289259, -0.33810138078404658038},
    {-1.4213994535132248, 1.3678430123873244, -2.2372035534401765436, 0.24725064907426458592},
    {-0.1748621139562887, -0.12183451382556941, 0.79003846718203575322, 2.4000327109067366087},
    {-0.0306983158668711, 0.007643608074918625, 2.8453358478622090145, -2.8898016335381046665},
    {0.0076531776716077535, 0.03130108940401464, 2.8657377155705011774, -1.299819023157105881},
    {-0.8281372754173301, 3.062962765497583, -0.069137302652439160424, 0.6927498014927910361},
    {-0.04470697749452426, 0.024309419637146938, 2.3558388951036775369, -2.618700372745827425},
    {-0.017408899973689697, -0.04309824805554136, 2.474470266614154824, 1.9112194426301138552},
    {0.7697966648395274, -1.6491843895470173, -0.15796473380283978467, 0.11508136608581604283},
    {-0.3423751396347256, -0.3660157146850452, -0.21853186287265933327, 1.8898690368072662931},
    {3.577420323883572, 2.462762672445106, -0.0054019061889021292897, -0.00088388447280959933033},
    {-0.4090842040192828, -1.6712869356619133, -0.75957883174130980361, 0.070293768265156348308},
    {0.3876405582835383, 0.5090340198768287, 0.27215618656341884759, -0.50343987730852747309},
    {0.02398910372688438, -0.0016877023035634805, 3.1743179381132356764, 0.06856952295977772911},
    {-0.007094519599878993, 0.031053862734348056, 2.8625130867006363067, -1.7642375851543338654},
    {-0.021665024770331307, 0.01577569055379706, 3.0204139391506613763, -2.4962660900644251941},
    {1.107862813062926, -2.686145445042696, -0.083911791618275312242, -0.047186699268537251242},
    {-22.059544343844543, 1.2244216334615994, -71206076.775384018155, 166207041.80398359804},
    {16.12773472208532, -2.2120689674145484, -4.0058949185655107689e-9, 4.1274495001612843474e-9},
    {15.034332233228263, -10.265533999893412, -2.4503104915999089465e-9, -1.5348668953326252503e-8},
    {15.131066417655672, 19.303016263368107, 2.5470947362207494805e-9, -1.0355840000086583012e-8},
    {0.007729488587371122, 0.1966310671116417, 1.0657537660799139713, -1.3360532969736779672},
    {-0.17379848279240478, -9.92487453034657, 0.048301771654497212862, -0.10811066390365111396},
    {-9.323177670160637, 1.7915006279351537, -2.8865277000551430839, 1335.6645827690698435},
    {-0.2552005552224439, -0.04735051329313182, 0.49978035743472154401, 2.9042027170243307472},
    {-0.01978901604907257, 0.024399098474890763, 2.8635079877472567399, -2.2276006984246822845},
    {-0.041165564618181154, -0.9452692715853694, -0.34228734570531238962, 0.69643720368993029963},
    {0.02412047931782943, 0.011990550616551366, 3.0610714444048663034, -0.44948657039771361642},
    {-0.04019555121448459, -0.09832234173110649, 1.6268933905867506802, 1.8586070850497825901},
    {-2.3169365184235757, 1.0655246348715064, -4.8943381179925202862, 1.0938606217201626918},
    {-0.07338296810857485, -0.044901429039913725, 1.8016188595877811651, 2.5459003604425876126},
    {-0.9740518995265973, -2.9825907193539196, -0.11167084902920724011, -0.81576185674514102399},
    {0.001532107663141533, -0.022181788865803614, 3.2305426877576301316, 1.4796711343551864359},
    {0.023900928493502987, 0.07261264831453029, 2.0190228881158467034, -1.1810787028671299788},
    {-1.0156387304446188, 0.5824257223052164, -1.9109763561685571345, -1.6346695518001950659},
    {-0.460019569193741, -0.2225538645559844, -0.40783070469044392715, 2.4092764878454387247},
    {-1.0701081985771839, -1.3478918469306358, -1.6842630129092629221, 0.12088786649748872061},
    {-7.623201478348285, 15.65784112259842, 40.888409972822019048, 112.77762688378369703},
    {-2.221173322417569, 2.773483590421207, 0.060930350245006605915, 2.7958608896294543952},
    {-0.07072493007709549, -0.05790838402508292, 1.7440916216517889879, 2.395509086180959099},
    {-0.1421014648720524, -0.4205645328968948, 0.13585158727562741691, 1.4492970770991977815},
    {-0.2735931071581895, -0.23766599497493082, 0.16120881204855819833, 2.1539090308095662733},
    {-4.906677054291782, -8.535429245376646, -6.4233940995814943904, -12.740560511827029368},
    {1.2956496672644173, 2.114482737374538, -0.087053218783617629488, -0.018651414263164206575},
    {3.714509583911966, 5.193865133375841, 0.0033768441738198771011, 0.00082122578467255048022},
    {-0.03205431107618693, -0.06522430813010364, 2.0133123271771773673, 1.9613132685193091875},
    {0.09279987359938219, -0.1006145198786418, 1.5045317685657177057, 0.72974548168934462769},
    {0.8538268412354715, -0.8450490031507354, 0.041181410200418759997, 0.22949186881371418963},
    {1.926997378630866, 0.8714627215912593, 0.018427045883282814248, -0.047500574345220846558},
    {0.4150410297689976, -0.9925112004508078, -0.094079566290322759277, 0.40121016913499358938},
    {0.47163484582911336, 0.4089231808466881, 0.34592171658395444721, -0.3909449767222158096},
    {0.08272984905915601, 0.09502513426370177, 1.5775062611170422805, -0.76330219202960038826},
    {14.414911700566005, -8.210985865895875, -2.3639585455609708457e-8, 2.0814707165829453565e-8},
    {-0.05707763287062344, -0.010497873294538808, 2.2116193770690668221, 2.9488995357846080115},
    {20.110944935598276, 5.1797190211143205, 5.5337608306689974711e-11, 6.4536542667801608792e-11},
    {0.25064010695756656, -0.01019604601375353, 1.0414870376207070077, 0.031638993922314647647},
    {-0.4528300598454457, -0.35913687224387664, -0.49508100930253632656, 2.0204398463652261099},
    {-0.7875551512705198, 0.20964242748104836, -1.3281037871955354824, -2.5634600602245974371},
    {0.3819966495633922, 0.23848025112375731, 0.5800123605857718914, -0.36044504908938796748},
    {-0.1454153165813144, 0.10460252625098267, 0.99456869979761166894, -2.4054873322396854751},
    {-0.02369173361206565, 0.0111648479277196, 3.0413345949138977595, -2.6899062554742104678},
    {-0.307854143568108, 0.15746734619386857, 0.15906621841128766139, -2.4846640875943114955},
    {-0.9987057123195336, 1.647117968368382, -1.3552796596831758069, 0.22250691643886979116},
    {-0.025220194168096188, -0.005722435869498273, 3.052421965642196581, 2.9126762927116783359},
    {-1.034103280277809, -2.1396171328733966, -0.92912507847600544522, -0.6898534388373387594},
    {-0.12169646657727769, 0.10817544742175644, 1.1155350633122316779, -2.2999905617084978855},
    {-0.5379595772789092, 1.8671866403163642, -0.78459171055942334558, 0.13338252170607670807},
    {-0.013913167356806276, 0.047679188652165375, 2.4117964822661903139, -1.806714326095052797},
    {0.18577984164488925, -4.080862941394598, 0.1204692074667477924, -0.14649902941789586337},
    {0.11221821708515571, -0.22960207071144206, 0.90844311314481041876, 0.89961780053099866186},
    {0.22248787240662155, -0.16091508692151013, 0.93157752402032937126, 0.48208711497351012693},
    {0.014201379710934728, -0.015533250248124318, 3.2980095642009136511, 0.81473687498581551943},
    {0.8826372036555659, 0.45893881120392527, 0.17819119033981330248, -0.177427496787780799},
    {-1.5929578467167396, -0.48403785121093834, -3.4490028284388920124, 1.6775478776949279097},
    {0.3215044576590226, -0.15697564344542803, 0.75300664608739997413, 0.32013364737187993568},
};

double max_abs(const MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

double binomial(int n, int k) {
  double b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// Continuum matrix of H_hat_k from the Taylor series of Ein: only entries
// with modes of opposite sign survive, one series term each.
MatrixXcd hhat_series(Complex k, int N) {
  BasisSpec spec;
  spec.N = N;
  MatrixXcd H = MatrixXcd::Zero(2 * N, 2 * N);
  for (int r = 0; r < 2 * N; ++r) {
    for (int c = 0; c < 2 * N; ++c) {
      const int m = spec.mode_of(r), n = spec.mode_of(c);
      if ((m > 0) == (n > 0)) continue;
      const int p = std::abs(m) + std::abs(n);
      double fact = 1;
      for (int i = 2; i <= p; ++i) fact *= i;
      const double a = (p % 2 == 1 ? 1.0 : -1.0) / (p * fact);
      if (m > 0) {
        H(r, c) = 0.5 * a * std::pow(-kI * k, p) * binomial(p, m) * (n % 2 == 0 ? 1.0 : -1.0);
      } else {
        H(r, c) = 0.5 * a * std::pow(kI * std::conj(k), p) * binomial(p, -m) *
                  (n % 2 == 0 ? 1.0 : -1.0);
      }
    }
  }
  return H;
}

TEST(ExpintE1, ReferenceTable) {
  ASSERT_EQ(std::size(kE1Table), 100u);
  for (const E1Case& c : kE1Table) {
    const Complex ref(c.e1_re, c.e1_im);
    const Complex got = expint_e1({c.re, c.im});
    EXPECT_LE(std::abs(got - ref), 1e-13 * std::abs(ref)) << c.re << " " << c.im;
  }
}

TEST(ExpintE1, Examples) {
  EXPECT_NEAR(expint_e1(1.0).real(), 0.21938393439552027368, 1e-15);
  for (double x : {0.1, 1.0, 3.7, 12.0, 40.0}) EXPECT_LE(std::abs(expint_e1(x).imag()), 1e-15);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int i = 0; i < 200; ++i) {
    const Complex z(u(rng), u(rng));
    const Complex a = std::conj(expint_e1(z)), b = expint_e1(std::conj(z));
    EXPECT_LE(std::abs(a - b), 1e-14 * std::abs(a));
  }
}

TEST(ExpintE1, BranchCut) {
  for (double x : {-2.0, -1e-3, 0.0}) {
    try {
      expint_e1(x);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kBranchCut);
    }
  }
}

TEST(G1, MatchesFourierQuadrature) {
  for (Complex z : {Complex(1, 1), Complex(0.4, -0.7), Complex(-1.5, 0.3)}) {
    const Complex ref = oracle::g1_quadrature(z);
    EXPECT_LE(std::abs(g1(z) - ref), 1e-5 * std::abs(ref)) << z;
  }
  try {
    g1(0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularArgument);
  }
}

TEST(G1, ScalingLaw) {
  const Complex k = 2.0, z = 0.3;
  const Complex ref = std::exp(kI * k * z) * oracle::g1_quadrature(k * z);
  EXPECT_LE(std::abs(faddeev_green(k, z) - ref), 1e-5 * std::abs(ref));
  EXPECT_EQ(faddeev_green(k, z), std::exp(kI * k * z) * g1(k * z));
}

TEST(G1, ConjugationSymmetry) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-6, 6);
  for (int i = 0; i < 200; ++i) {
    const Complex z(u(rng), u(rng));
    const Complex a = std::conj(g1(z)), b = g1(-std::conj(z));
    EXPECT_LE(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST(H1, Harmonic) {
  const double h = 1e-3;
  for (int j = 0; j < 8; ++j) {
    const Complex z = std::polar(0.5, kTwoPi * j / 8 + 0.1);
    const double lap =
        (h1(z + h) + h1(z - h) + h1(z + kI * h) + h1(z - kI * h) - 4 * h1(z)) / (h * h);
    EXPECT_LE(std::abs(lap), 1e-4);
  }
}

TEST(H1AtZero, Extrapolation) {
  double res = 0;
  const double a = h1_limit(1.0, 1e-2, &res);
  EXPECT_LE(res, 1e-10);
  EXPECT_NEAR(h1_limit(kI), a, 1e-9);
  EXPECT_NEAR(h1_limit(1.0, 5e-3), a, 1e-9);
  EXPECT_EQ(h1_at_zero(), h1_at_zero());
  EXPECT_EQ(h1_at_zero(), a);
  EXPECT_NEAR(a, -kEulerGamma / kTwoPi, 1e-10);
}

TEST(Hhat, Kernel) {
  EXPECT_EQ(hhat(3.0, 0.0), 0.0);
  const Complex k(1.3, -0.4), z(0.2, 0.5);
  EXPECT_NEAR(hhat(k, z), h1(k * z) - h1_at_zero(), 1e-12);
}

TEST(AssembleHhat, MatchesSeriesOracle) {
  BasisSpec spec;
  for (Complex k : {Complex(0.5, 0), Complex(2.0, 1.0), Complex(-6.0, 3.5), Complex(12, -12)}) {
    const MatrixXcd H = assemble_hhat(k, spec, HhatAssembly::kDirect).entries;
    const MatrixXcd ref = hhat_series(k, 16);
    EXPECT_LE(max_abs(H - ref), 1e-10 * max_abs(ref)) << k;
  }
}

TEST(AssembleHhat, CachedMatchesDirect) {
  BasisSpec spec;
  HhatCache cache;
  for (Complex k : {Complex(0.7, 0.2), Complex(-3, 4), Complex(-12, -12), Complex(0, 9)}) {
    const MatrixXcd a = assemble_hhat(k, spec, HhatAssembly::kDirect).entries;
    const MatrixXcd b = assemble_hhat(k, spec, HhatAssembly::kCached, 256, &cache).entries;
    EXPECT_LE(max_abs(a - b), 1e-12 * max_abs(a)) << k;
  }
  // Same |k| shares one entry; smaller N is a submatrix.
  const std::size_t before = cache.size();
  spec.N = 8;
  const MatrixXcd small = assemble_hhat(Complex(5, 0), spec, HhatAssembly::kCached, 256, &cache).entries;
  const MatrixXcd direct = assemble_hhat(Complex(5, 0), spec, HhatAssembly::kDirect).entries;
  EXPECT_EQ(cache.size(), before);
  EXPECT_LE(max_abs(small - direct), 1e-12 * max_abs(direct));
}

TEST(AssembleHhat, SymmetryLemma) {
  BasisSpec spec;
  for (Complex k : {Complex(1.5, 0.5), Complex(-4, 7), Complex(10, -2)}) {
    const OperatorMatrix h = assemble_hhat(k, spec, HhatAssembly::kDirect);
    const MatrixXcd S = single_layer_from_hhat(h, k);
    const MatrixXcd Sneg = single_layer_from_hhat(assemble_hhat(-k, spec, HhatAssembly::kDirect), -k);
    const MatrixXcd Sbar = single_layer_from_hhat(
        assemble_hhat(std::conj(k), spec, HhatAssembly::kDirect), std::conj(k));
    const MatrixXcd Srad = single_layer_from_hhat(
        assemble_hhat(std::abs(k), spec, HhatAssembly::kDirect), std::abs(k));
    const double scale = max_abs(S);
    EXPECT_LE(max_abs(Sneg - S.transpose().conjugate()), 1e-10 * scale);
    EXPECT_LE(max_abs(Sbar - S.transpose()), 1e-10 * scale);
    const double alpha = std::arg(k);
    MatrixXcd E(32, 32);
    for (int r = 0; r < 32; ++r) {
      for (int c = 0; c < 32; ++c) {
        E(r, c) = std::polar(1.0, alpha * (spec.mode_of(r) - spec.mode_of(c)));
      }
    }
    EXPECT_LE(max_abs(S - E.cwiseProduct(Srad)), 1e-10 * scale);
  }
}

TEST(AssembleHhat, Errors) {
  BasisSpec spec;
  try {
    assemble_hhat(0.0, spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularParameter);
  }
}

TEST(AssembleHhat, FiniteAtGridCorners) {
  BasisSpec spec;
  for (Complex k : {Complex(12, 12), Complex(-12, 12), Complex(12, -12), Complex(-12, -12),
                    Complex(12, 0.1875), Complex(0.1875, 0.1875)}) {
    EXPECT_TRUE(assemble_hhat(k, spec).entries.allFinite()) << k;
  }
}

}  // namespace
}  // namespace cdbar
