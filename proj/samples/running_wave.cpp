// A Gaussian packet on the 1D ZeroMax lattice: its centroid drifts at the group velocity of the carrier.
#include <cmath>
#include <cstdio>
#include <numbers>

#include "lwave/experiment.hpp"

namespace {

double centroid(const lwave::GridField<double>& f, int origin) {
  const int N = f.shape().extent();
  double w = 0.0, m = 0.0;
  for (int x = 0; x < N; ++x) {
    int dx = lwave::wrap_index(x - origin, N);
    if (dx > N / 2) dx -= N;
    const double e = f[static_cast<std::size_t>(x)] * f[static_cast<std::size_t>(x)];
    w += e;
    m += e * dx;
  }
  return m / w;
}

}  // namespace

int main() {
  lwave::SimulationSpec s;
  s.init = lwave::InitKind::Packet;
  s.width = 16.0;
  s.frames = 65;
  const int N = s.N();
  std::printf("carrier  band    velocity  drift/64 steps  expected\n");
  for (int carrier : {8, 16, 32, N / 2 - 32, N / 2 - 8}) {
    s.freq = {carrier, 0, 0, 0};
    const auto h = lwave::simulate_history(s);
    const bool low = carrier <= N / 4;
    const double theta = 2 * std::numbers::pi * (low ? carrier : carrier - N / 2) / N;
    const double v = (low ? 1.0 : -1.0) * std::cos(theta) / (1.0 + std::sin(theta) * std::sin(theta));
    const double drift = centroid(h.frame(64), N / 2) - centroid(h.frame(0), N / 2);
    std::printf("%7d  %-6s  %+8.4f  %+14.2f  %+8.2f\n", carrier, low ? "[0]" : "[N/2]", v, drift, -64 * v);
  }
}
