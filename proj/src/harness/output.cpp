#include <cmath>
#include <cstdio>
#include <fstream>

#include <openssl/evp.h>

#include "qpc/errors.hpp"
#include "qpc/harness.hpp"
#include "qpc/parallel.hpp"

namespace qpc::harness {

namespace {

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += quote_if_needed(fields[i]);
    }
    out += "\r\n";
  };
  line(table.header);
  for (const auto& row : table.rows) {
    std::vector<std::string> f;
    for (const auto& cell : row) {
      if (const auto* d = std::get_if<double>(&cell))
        f.push_back(format_double(*d));
      else if (const auto* i = std::get_if<std::int64_t>(&cell))
        f.push_back(std::to_string(*i));
      else
        f.push_back(std::get<std::string>(cell));
    }
    line(f);
  }
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return kConfig;
  if (dynamic_cast<const BudgetError*>(&e)) return kBudget;
  if (dynamic_cast<const RegimeError*>(&e) || dynamic_cast<const PrecisionError*>(&e) ||
      dynamic_cast<const ContourError*>(&e) || dynamic_cast<const PoleError*>(&e) ||
      dynamic_cast<const ResolutionError*>(&e))
    return kNumericRegime;
  return kFailure;
}

RunResult run(const ExperimentConfig& config) {
  RunResult res;
  if (config.threads > 0) set_worker_count(static_cast<std::size_t>(config.threads));
  const std::filesystem::path root = config.output_dir.empty() ? default_output_dir() : config.output_dir;
  res.directory = root / config.experiment;

  ExperimentOutput out;
  try {
    out = execute(config);
  } catch (const Error& e) {
    res.exit_code = exit_code_for(e);
    res.message = e.what();
    return res;
  } catch (const nlohmann::json::exception& e) {
    res.exit_code = kConfig;
    res.message = std::string("bad parameter: ") + e.what();
    return res;
  }
  if (out.budget_exhausted) {
    res.exit_code = kBudget;
    res.message = "zero search budget exhausted; results are partial";
  }

  std::filesystem::create_directories(res.directory);
  Json files = Json::array();
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(res.directory / name, content);
    files.push_back({{"path", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
  };
  for (const auto& t : out.tables) emit(t.name, to_csv(t));
  for (const auto& f : out.files) emit(f.name, f.content);
  out.summary["experiment"] = config.experiment;
  out.summary["anchor"] = experiment_info(config.experiment).anchor;
  out.summary["budget_exhausted"] = out.budget_exhausted;
  emit("summary.json", out.summary.dump(2) + "\n");

  res.manifest = {{"tool", "qpclab"},
                  {"config", config.to_json()},
                  {"files", files},
                  {"exit_code", res.exit_code},
                  {"reproducible", config.reproducible}};
  write_file(res.directory / "manifest.json", res.manifest.dump(2) + "\n");
  return res;
}

}  // namespace qpc::harness
