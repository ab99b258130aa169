#include "mbsts/draws_io.hpp"

#include <json.hpp>

#include <fstream>

namespace mbsts {

namespace {

constexpr char kMagic[] = "MBSTS-DRAWS-1";

void write_matrix(std::ostream& out, const Matrix& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
}

Matrix read_matrix(std::istream& in, int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double v = 0;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      m(i, j) = v;
    }
  }
  if (!in) throw invalid_argument("load_draws: truncated file");
  return m;
}

}  // namespace

void save_draws(const std::string& path, const McmcDraws& draws) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid_argument("save_draws: cannot write '" + path + "'");

  nlohmann::json header;
  header["t_star"] = draws.t_star;
  header["d"] = draws.d;
  header["m"] = draws.m;
  header["r"] = draws.r;
  header["num_covariates"] = draws.num_covariates;
  header["niter"] = draws.niter;
  header["burn_in"] = draws.burn_in;
  header["seed"] = draws.seed;
  header["states_stored"] = draws.states_stored;
  header["count"] = draws.size();
  out << kMagic << "\n" << header.dump() << "\n";

  for (int s = 0; s < draws.size(); ++s) {
    if (draws.states_stored) {
      for (const auto& state : draws.states[s]) write_matrix(out, state);
    }
    write_matrix(out, draws.last_state[s]);
    write_matrix(out, draws.beta[s]);
    for (auto flag : draws.rho[s]) {
      const char byte = static_cast<char>(flag);
      out.write(&byte, 1);
    }
    write_matrix(out, draws.sigma_eps[s]);
    for (const auto& sr : draws.sigma_r[s]) write_matrix(out, sr);
  }
}

McmcDraws load_draws(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_argument("load_draws: cannot open '" + path + "'");
  std::string magic, header_line;
  std::getline(in, magic);
  if (magic != kMagic) throw invalid_argument("load_draws: '" + path + "' is not a draws file");
  std::getline(in, header_line);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::parse_error& e) {
    throw invalid_argument(std::string("load_draws: bad header: ") + e.what());
  }

  McmcDraws draws;
  draws.t_star = header.at("t_star").get<int>();
  draws.d = header.at("d").get<int>();
  draws.m = header.at("m").get<int>();
  draws.r = header.at("r").get<int>();
  draws.num_covariates = header.at("num_covariates").get<int>();
  draws.niter = header.at("niter").get<int>();
  draws.burn_in = header.at("burn_in").get<int>();
  draws.seed = header.at("seed").get<std::uint64_t>();
  draws.states_stored = header.at("states_stored").get<bool>();
  const int count = header.at("count").get<int>();

  for (int s = 0; s < count; ++s) {
    if (draws.states_stored) {
      std::vector<Matrix> path_states;
      path_states.reserve(draws.t_star);
      for (int t = 0; t < draws.t_star; ++t) {
        path_states.push_back(read_matrix(in, draws.m, draws.d));
      }
      draws.states.push_back(std::move(path_states));
    }
    draws.last_state.push_back(read_matrix(in, draws.m, draws.d));
    draws.beta.push_back(read_matrix(in, draws.num_covariates, draws.d));
    std::vector<std::uint8_t> rho(draws.num_covariates);
    for (int j = 0; j < draws.num_covariates; ++j) {
      char byte = 0;
      in.read(&byte, 1);
      rho[j] = static_cast<std::uint8_t>(byte);
    }
    draws.rho.push_back(std::move(rho));
    draws.sigma_eps.push_back(read_matrix(in, draws.d, draws.d));
    std::vector<Matrix> sr;
    sr.reserve(draws.r);
    for (int k = 0; k < draws.r; ++k) sr.push_back(read_matrix(in, draws.d, draws.d));
    draws.sigma_r.push_back(std::move(sr));
  }
  if (!in) throw invalid_argument("load_draws: truncated file");
  return draws;
}

}  // namespace mbsts
