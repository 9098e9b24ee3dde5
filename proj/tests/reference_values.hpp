#pragma once

#include <vector>

#include "topicdrift/stats.hpp"

namespace topicdrift::reference {

struct TTestCase {
  std::vector<double> x, y;
  bool equal_var;
  Alternative alternative;
  double t, df, p;
};

/// Computed with mpmath at 50 digits (regularized incomplete beta) and cross-checked
/// against scipy.stats.ttest_ind to 1e-9.
inline const std::vector<TTestCase>& t_test_cases() {
  static const std::vector<TTestCase> cases{
    {{1.0, 2.0, 3.0}, {2.0, 3.0, 4.0}, true, Alternative::two_sided, -1.224744871391589, 4, 0.28786413472669066},
    {{1.0, 2.0, 3.0, 4.0, 5.0}, {2.0, 4.0, 6.0, 8.0, 10.0}, true, Alternative::two_sided, -1.8973665961010276, 8, 0.094349772842437658},
    {{1.0, 2.0, 3.0, 4.0, 5.0}, {2.0, 4.0, 6.0, 8.0, 10.0}, false, Alternative::two_sided, -1.8973665961010276, 5.8823529411764706, 0.10753119493062724},
    {{10.1, 9.8, 10.3, 10.0}, {9.1, 9.4, 9.0, 9.6, 9.2}, true, Alternative::greater, 5.1786381831088663, 7, 0.00064140571778477657},
    {{10.1, 9.8, 10.3, 10.0}, {9.1, 9.4, 9.0, 9.6, 9.2}, false, Alternative::greater, 5.2744865175459635, 6.9166009172677434, 0.0005999524916107759},
    {{0.5, 0.7, 0.2}, {0.9, 1.4, 1.1, 1.3}, true, Alternative::less, -3.9605633006816133, 5, 0.0053684014618040399},
    {{0.5, 0.7, 0.2}, {0.9, 1.4, 1.1, 1.3}, false, Alternative::less, -3.8756663969942022, 4.0839702741346137, 0.0086091074762358695},
    {{3.0, 3.0, 4.0}, {1.0, 9.0, 5.0, 2.0, 8.0}, false, Alternative::two_sided, -1.0314212462587934, 4.3462862764387605, 0.35628225481446608},
    {{1.0, 2.0}, {100.0, 101.0}, true, Alternative::two_sided, -140.00714267493641, 2, 5.1011299035914747e-5},
    {{1.0, 2.0}, {100.0, 101.0}, true, Alternative::greater, -140.00714267493641, 2, 0.99997449435048204},
    {{1.642, 1.147, -0.973, -1.393, 0.067}, {0.861, 0.509, 1.81, 0.751, 0.64, -0.731, -1.108, 1.484, 0.049, 0.812}, true, Alternative::two_sided, -0.71686617785854711, 13, 0.4861374695374105},
    {{-0.436, -1.291}, {-1.051, 2.306, -2.461, -0.568, 0.828, -0.837, -0.005, 0.056, 1.336, -0.363, 1.045, 0.614, 1.349, 0.95}, false, Alternative::greater, -2.0268457696400944, 2.4572676952236584, 0.92217560218646306},
    {{-0.664, 1.199, -0.403, -0.958, 1.211, -0.44}, {0.612, -0.389, -1.098, 1.634, -0.165, 1.778, 2.848, 0.885}, true, Alternative::less, -1.2216004209214236, 12, 0.1226574893893695},
    {{0.394, 0.762, -0.262, 0.017}, {2.671, 2.531, 1.42, -1.733, -0.107, 1.206, -0.424, -1.22, -1.531, -1.264, -1.343}, false, Alternative::two_sided, 0.38213748467478304, 12.703258518311882, 0.70867574802401699},
    {{1.146, -0.801, 0.887, 0.418, 0.14, -0.827, -0.457, 1.974, 0.099, 0.538}, {1.163, 1.556, 0.262, -0.11, 0.44, 0.239, 1.291, 0.69}, true, Alternative::greater, -1.0400233609465244, 16, 0.84310453063062888},
    {{0.145, 1.228, -0.543, -0.478}, {2.77, 0.787, 1.722, -0.458, 1.047, 1.864, -1.655}, false, Alternative::less, -1.114594765111389, 8.9955361085101783, 0.14695791685134696},
    {{0.423, 2.249, 0.462, -0.059, -0.845, 0.392, -2.501, -0.05, -0.33, -0.519, 2.32, -2.474, -0.022}, {0.069, 0.467, -1.602, -0.467, -1.495, -0.128, 0.196, 0.164, -0.198}, true, Alternative::two_sided, 0.4986419224877462, 20, 0.62347144257793253},
    {{0.177, 0.405, 0.025, -1.783, -0.815, 0.346}, {-1.321, -1.097, 0.727, 0.409, 2.288, 1.524, -0.37, 0.729, -5.218, -1.095}, false, Alternative::greater, 0.09131815454035324, 12.9596197213531, 0.46431810184400615},
    {{-2.387, -0.322, 0.252, 1.035, 0.403, 1.884, 1.528, -1.634, -0.226, -0.156, 0.092, -0.573, 0.61}, {1.745, -0.524, 1.945, 0.352, 2.056, 1.565, 0.869, 2.988, 1.89, 1.032, 1.249, 3.415, 2.417}, true, Alternative::less, -3.6076615603021644, 24, 0.00070522962601029693},
    {{0.215, 0.563, 0.148, -1.526, 0.886, 0.415, -1.351, -0.642}, {-0.496, 0.651, 3.458, 0.035, -3.882, 1.3, -0.336, -3.486, -4.563, -2.129, 0.757, -1.517, 1.199}, false, Alternative::two_sided, 0.73781375306182531, 16.850444440918379, 0.4707785752064701},
  };
  return cases;
}

}  // namespace topicdrift::reference
