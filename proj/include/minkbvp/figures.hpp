#pragma once
// One-command reproduction of the three benchmark figure datasets:
//   1 - Neumann branch in lambda for the exp-power problem on a two-piece weight
//   2 - Neumann branch in kappa for the power-exp problem (fold + both arms)
//   3 - Cauchy family on the symmetric three-piece weight, domain offset -2
// Each run writes CSV data, the embedded reference anchor table, and a
// summary with measured-vs-reference deltas.

#include <string>
#include <vector>

namespace minkbvp {

struct AnchorComparison {
  std::string label;
  double reference = 0.0;
  double measured = 0.0;
  double abs_delta = 0.0;
  double rel_delta = 0.0;
};

struct FigureResult {
  std::vector<std::string> files;  // all paths written, summary last
  std::string summary_path;
  std::vector<AnchorComparison> comparisons;
};

FigureResult reproduce_figure(int which, const std::string& out_dir);

}  // namespace minkbvp
