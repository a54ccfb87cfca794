#include <benchmark/benchmark.h>

#include <string>

#include "skg/ingest.hpp"
#include "skg/porter.hpp"

namespace {

const std::string kParagraph =
    "Statistical analyses were performed with SPSS software version 23 "
    "(SPSS Inc., Chicago, USA) and the R environment for statistical "
    "computing. Descriptive statistics were calculated for all variables. "
    "Group differences were assessed with two-sided t-tests, e.g. for age "
    "and weight, and p values below 0.05 were considered significant. "
    "Figures were produced with GraphPad Prism v6.0 and MATLAB R2014b.";

void BM_Tokenize(benchmark::State& state) {
  auto cfg = skg::ingest::TextConfig::defaults();
  for (auto _ : state) {
    auto toks = skg::ingest::tokenize(kParagraph, cfg);
    benchmark::DoNotOptimize(toks);
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(kParagraph.size()));
}
BENCHMARK(BM_Tokenize);

void BM_SplitSentences(benchmark::State& state) {
  auto cfg = skg::ingest::TextConfig::defaults();
  for (auto _ : state) {
    auto ss = skg::ingest::split_sentences(kParagraph, cfg);
    benchmark::DoNotOptimize(ss);
  }
  state.SetBytesProcessed(int64_t(state.iterations()) * int64_t(kParagraph.size()));
}
BENCHMARK(BM_SplitSentences);

void BM_Stem(benchmark::State& state) {
  const std::string words[] = {"statistical", "analyses",   "performed", "significance",
                               "computing",   "descriptive", "variables", "considered"};
  size_t i = 0;
  for (auto _ : state) {
    auto s = skg::stem(words[i++ % 8]);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_Stem);

}  // namespace

BENCHMARK_MAIN();
