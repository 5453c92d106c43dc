// Shared fixtures and independent oracles for the test suites. Oracles here
// are deliberately naive (enumeration, O(n^2) counting) so they cannot share
// a bug with the library code they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <sys/wait.h>

#include "rankad/common.hpp"

namespace testsupport {

inline rankad::Matrix matrix_from(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = rows.begin()->size();
  rankad::Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline rankad::NominalDataset dataset_from(
    std::initializer_list<std::initializer_list<double>> rows) {
  return rankad::NominalDataset(matrix_from(rows));
}

/// Column vector dataset from scalars.
inline rankad::NominalDataset dataset_1d(const std::vector<double>& xs) {
  rankad::Matrix m(xs.size(), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) m(i, 0) = xs[i];
  return rankad::NominalDataset(std::move(m));
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// p-value of a standard normal draw: P(|X| >= |x|).
inline double two_sided_pvalue(double x) {
  return std::erfc(std::abs(x) / std::sqrt(2.0));
}

/// O(n0*n1) Mann-Whitney count, ties one half. Arranged as the same final
/// integer expression the library uses so exact agreement is meaningful.
inline double brute_force_auc(const std::vector<double>& nominal,
                              const std::vector<double>& anomaly) {
  unsigned long long wins = 0, ties = 0;
  for (double a : nominal) {
    for (double b : anomaly) {
      if (a > b) {
        ++wins;
      } else if (a == b) {
        ++ties;
      }
    }
  }
  const unsigned long long total =
      static_cast<unsigned long long>(nominal.size()) *
      static_cast<unsigned long long>(anomaly.size());
  return static_cast<double>(2 * wins + ties) / static_cast<double>(2 * total);
}

inline std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = shared;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& a,
                      const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline double spearman(const std::vector<double>& a,
                       const std::vector<double>& b) {
  return pearson(average_ranks(a), average_ranks(b));
}

// --------------------------------------------------------------------------
// Box-constrained QP oracle: maximize sum(a) - 1/2 a'Qa over [0, c]^p by
// enumerating every bound/free pattern (3^p of them) and solving the free
// block exactly. Intended for p <= 8.

struct BoxQpSolution {
  double objective = 0.0;
  std::vector<double> alphas;
};

/// Gaussian elimination with partial pivoting; returns false on a
/// (numerically) singular system.
inline bool solve_linear(std::vector<double> m, std::vector<double>& rhs) {
  const std::size_t p = rhs.size();
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < p; ++r) {
      if (std::abs(m[r * p + col]) > std::abs(m[piv * p + col])) piv = r;
    }
    if (std::abs(m[piv * p + col]) < 1e-13) return false;
    if (piv != col) {
      for (std::size_t k = 0; k < p; ++k) {
        std::swap(m[piv * p + k], m[col * p + k]);
      }
      std::swap(rhs[piv], rhs[col]);
    }
    for (std::size_t r = col + 1; r < p; ++r) {
      const double f = m[r * p + col] / m[col * p + col];
      for (std::size_t k = col; k < p; ++k) m[r * p + k] -= f * m[col * p + k];
      rhs[r] -= f * rhs[col];
    }
  }
  for (std::size_t col = p; col-- > 0;) {
    double s = rhs[col];
    for (std::size_t k = col + 1; k < p; ++k) s -= m[col * p + k] * rhs[k];
    rhs[col] = s / m[col * p + col];
  }
  return true;
}

inline BoxQpSolution solve_box_qp(const std::vector<double>& q, std::size_t p,
                                  double c) {
  auto objective = [&](const std::vector<double>& a) {
    double lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      lin += a[i];
      for (std::size_t j = 0; j < p; ++j) quad += a[i] * q[i * p + j] * a[j];
    }
    return lin - 0.5 * quad;
  };

  BoxQpSolution best;
  best.alphas.assign(p, 0.0);
  best.objective = 0.0;

  std::size_t patterns = 1;
  for (std::size_t i = 0; i < p; ++i) patterns *= 3;
  for (std::size_t code = 0; code < patterns; ++code) {
    std::vector<int> state(p);  // 0: at 0, 1: at c, 2: free
    std::size_t rem = code;
    for (std::size_t i = 0; i < p; ++i) {
      state[i] = static_cast<int>(rem % 3);
      rem /= 3;
    }
    std::vector<double> a(p, 0.0);
    std::vector<std::size_t> free_idx;
    for (std::size_t i = 0; i < p; ++i) {
      if (state[i] == 1) {
        a[i] = c;
      } else if (state[i] == 2) {
        free_idx.push_back(i);
      }
    }
    if (!free_idx.empty()) {
      const std::size_t f = free_idx.size();
      std::vector<double> qff(f * f);
      std::vector<double> rhs(f);
      for (std::size_t r = 0; r < f; ++r) {
        double s = 1.0;
        for (std::size_t i = 0; i < p; ++i) {
          if (state[i] == 1) s -= q[free_idx[r] * p + i] * c;
        }
        rhs[r] = s;
        for (std::size_t k = 0; k < f; ++k) {
          qff[r * f + k] = q[free_idx[r] * p + free_idx[k]];
        }
        qff[r * f + r] += 1e-12;  // ridge so flat directions stay solvable
      }
      if (!solve_linear(std::move(qff), rhs)) continue;
      bool ok = true;
      for (std::size_t r = 0; r < f; ++r) {
        if (rhs[r] < -1e-9 || rhs[r] > c + 1e-9) {
          ok = false;
          break;
        }
        a[free_idx[r]] = std::clamp(rhs[r], 0.0, c);
      }
      if (!ok) continue;
    }
    const double val = objective(a);
    if (val > best.objective) {
      best.objective = val;
      best.alphas = a;
    }
  }
  return best;
}

// --------------------------------------------------------------------------
// Process helpers for exercising the installed CLI.

inline const char* cli_path() { return std::getenv("RANKAD_CLI"); }

inline std::string make_temp_dir() {
  char tmpl[] = "/tmp/rankad-test-XXXXXX";
  char* made = mkdtemp(tmpl);
  if (made == nullptr) throw std::runtime_error("mkdtemp failed");
  return made;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline CliResult run_cli(const std::string& args, const std::string& dir) {
  const char* cli = cli_path();
  if (cli == nullptr) throw std::runtime_error("RANKAD_CLI is not set");
  const std::string out_path = dir + "/.stdout";
  const std::string err_path = dir + "/.stderr";
  const std::string cmd =
      std::string(cli) + " " + args + " > " + out_path + " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  CliResult res;
  if (WIFEXITED(status)) {
    res.exit_code = WEXITSTATUS(status);
  }
  res.out = read_file(out_path);
  res.err = read_file(err_path);
  return res;
}

}  // namespace testsupport
