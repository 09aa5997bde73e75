// Walks the test ladder for a few Bertrand-type series and prints each step
// next to the oracle's view of the predicted rate.

#include <iostream>

#include "serieslab/analysis/ladder.hpp"
#include "serieslab/oracle/oracle.hpp"

using namespace serieslab;
using namespace serieslab::analysis;

int main(int argc, char** argv) {
  std::vector<std::string> texts = {"n^(-3/2)", "(ln(n))^(1/2)/n", "1/(n*(ln(n))^2)", "(lnln(n))^(-2)/(n*ln(n))",
                                    "1/(n*ln(n)*lnln(n))"};
  if (argc > 1) texts.assign(argv + 1, argv + argc);

  for (const auto& t : texts) {
    const Sequence s = Sequence::from_text(t);
    const AnalysisReport r = ladder(s, {});
    std::cout << t << "  ->  " << to_string(r.final_decision) << "\n";
    for (const Verdict& v : r.trace) {
      std::cout << "    " << v.test << " (w=" << v.w << (v.level ? ", level " + std::to_string(v.level) : "")
                << "): " << (v.exact ? expr::to_string(*v.exact) : v.statistic.value.to_string(8)) << "  "
                << to_string(v.decision) << "\n";
    }
    if (!r.final_index || !r.trace[*r.final_index].rate) continue;
    const RatePrediction& rate = *r.trace[*r.final_index].rate;
    const oracle::FitReport fit = oracle::slope_check(s, rate, {10'000, 100'000, 1'000'000}, 0.02);
    std::cout << "    rate: " << rate.formula() << "\n    oracle: " << oracle::to_string(fit.status) << ", "
              << fit.message << "\n";
  }
}
