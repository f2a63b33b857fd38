#include "esi/grid.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace esi {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidLame: return "InvalidLame";
    case ErrorCode::StabilityViolation: return "StabilityViolation";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::BadShape: return "BadShape";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::NonFiniteData: return "NonFiniteData";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::NotDivisor: return "NotDivisor";
    case ErrorCode::EmptyMeasurements: return "EmptyMeasurements";
    case ErrorCode::BadPencil: return "BadPencil";
    case ErrorCode::DuplicateFrequency: return "DuplicateFrequency";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    case ErrorCode::OddLength: return "OddLength";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::FactorizationFailure: return "FactorizationFailure";
    case ErrorCode::NullSpaceTooSmall: return "NullSpaceTooSmall";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::NearKink: return "NearKink";
    case ErrorCode::DegenerateImage: return "DegenerateImage";
    case ErrorCode::ZeroSignal: return "ZeroSignal";
    case ErrorCode::IdenticalImages: return "IdenticalImages";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

GridSpec make_grid(double beta, int n_x, double t_max, int n_t, double lambda,
                   double mu, int pml_width) {
  require(beta > 0.0 && t_max > 0.0, ErrorCode::InvalidArgument,
          "beta and t_max must be positive");
  require(is_pow2(n_x) && is_pow2(n_t), ErrorCode::BadShape,
          "n_x and n_t must be powers of two");
  require(mu > 0.0 && lambda + 2.0 * mu > 0.0, ErrorCode::InvalidLame,
          "need mu > 0 and lambda + 2*mu > 0");
  require(pml_width >= 0 && 2 * pml_width < n_x, ErrorCode::InvalidArgument,
          "pml_width must satisfy 0 <= pml_width < n_x/2");

  GridSpec g;
  g.beta = beta;
  g.n_x = n_x;
  g.h_x = beta / n_x;
  g.t_max = t_max;
  g.n_t = n_t;
  g.h_t = t_max / n_t;
  g.lambda = lambda;
  g.mu = mu;
  g.pml_width = pml_width;

  // The exact per-mode propagator is unconditionally stable; the binding
  // constraint is that a P wavefront must not cross the absorbing layer in
  // fewer than sqrt(2) steps, otherwise the splitting cannot damp it.
  if (pml_width > 0) {
    const double bound = pml_width * g.h_x / (g.c_p() * std::sqrt(2.0));
    if (g.h_t > bound * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "h_t = " << g.h_t << " exceeds PML crossing bound " << bound;
      fail(ErrorCode::StabilityViolation, os.str());
    }
  }
  return g;
}

std::string grid_to_json(const GridSpec& g) {
  nlohmann::json j;
  j["beta"] = g.beta;
  j["n_x"] = g.n_x;
  j["h_x"] = g.h_x;
  j["t_max"] = g.t_max;
  j["n_t"] = g.n_t;
  j["h_t"] = g.h_t;
  j["lambda"] = g.lambda;
  j["mu"] = g.mu;
  j["pml_width"] = g.pml_width;
  return j.dump(2);
}

GridSpec grid_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::IoError, std::string("bad grid JSON: ") + e.what());
  }
  for (const char* key : {"beta", "n_x", "h_x", "t_max", "n_t", "h_t",
                          "lambda", "mu", "pml_width"}) {
    require(j.contains(key), ErrorCode::IoError,
            std::string("grid JSON missing field ") + key);
  }
  GridSpec g = make_grid(j["beta"].get<double>(), j["n_x"].get<int>(),
                         j["t_max"].get<double>(), j["n_t"].get<int>(),
                         j["lambda"].get<double>(), j["mu"].get<double>(),
                         j["pml_width"].get<int>());
  require(j["h_x"].get<double>() == g.h_x && j["h_t"].get<double>() == g.h_t,
          ErrorCode::IoError, "stored h_x/h_t disagree with beta/n_x, t_max/n_t");
  return g;
}

void save_grid(const GridSpec& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::IoError, "cannot open " + path);
  out << grid_to_json(g) << "\n";
  require(out.good(), ErrorCode::IoError, "write failed: " + path);
}

GridSpec load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoError, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return grid_from_json(os.str());
}

}  // namespace esi
