// Parallel vs serial timings for the two data-parallel kernels.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "spaceprofiler/profiling.hpp"
#include "spaceprofiler/similarity.hpp"
#include "spaceprofiler/synth.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace spaceprofiler;

namespace {

double best_of(int reps, const std::function<void()>& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s serial %9.3f ms  parallel %9.3f ms  speedup %5.2fx\n", name, serial * 1e3,
              parallel * 1e3, serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const int sensors = argc > 1 ? std::atoi(argv[1]) : 200;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 3;
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif

  SynthConfig cfg = default_synth_config(7);
  const int per = std::max(1, sensors / static_cast<int>(cfg.archetypes.size()));
  cfg.sensors_per_archetype.assign(cfg.archetypes.size(), per);
  const SyntheticDataset ds = synth_generate(cfg);
  const DayLabels labels = label_days(cfg.calendar, cfg.calendar.span);
  std::printf("sensors: %zu, days: %lld\n", ds.series.size(),
              static_cast<long long>(cfg.calendar.span.days()));

  std::vector<SensorProfiles> profiles;
  const double sp = best_of(reps, [&] { profiles = serial::build_profiles(ds.series, labels); });
  const double pp = best_of(reps, [&] { profiles = build_profiles(ds.series, labels); });
  report("build_profiles", sp, pp);

  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  for (const auto& s : profiles) {
    ids.push_back(s.sensor_id);
    rows.push_back(fill_gaps(s[DayType::weekday]));
  }
  for (const Kernel& k : {Kernel::wied(2), Kernel::euclidean(), Kernel::minkowski(3.0)}) {
    SimilarityMatrix m;
    const double ss = best_of(reps, [&] { m = serial::similarity_matrix(ids, rows, k); });
    const double ps = best_of(reps, [&] { m = similarity_matrix(ids, rows, k); });
    report(("similarity_matrix " + k.name()).c_str(), ss, ps);
  }
  return 0;
}
