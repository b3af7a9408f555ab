#include "qtomo/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qtomo::io {

namespace {

// The typographic minus is accepted on input; files are written with '-'.
constexpr std::string_view kUnicodeMinus = "−";

std::string normalize_label(std::string label) {
  for (std::size_t pos; (pos = label.find(kUnicodeMinus)) != std::string::npos;) {
    label.replace(pos, kUnicodeMinus.size(), "-");
  }
  return label;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<PauliString> parse_components(const std::string& list, int n_qubits) {
  std::vector<PauliString> out;
  for (const std::string& c : split(list, '+')) {
    PauliString p(c);
    if (static_cast<int>(p.n_qubits()) != n_qubits) {
      throw std::invalid_argument("component " + c + " does not match a " + std::to_string(n_qubits) + "-qubit record");
    }
    out.push_back(std::move(p));
  }
  if (out.empty()) throw std::invalid_argument("empty component list");
  return out;
}

ModelSpec grouping_from_token(const std::string& g, const ExperimentRecord& r) {
  if (g == "halves") return halves_model(r.blocks.size(), std::nullopt);
  if (g == "per-block") return per_block_model(r.blocks.size());
  if (g == "per-setting") return per_setting_model(r);
  ModelSpec m{"", {}, std::nullopt};
  for (const std::string& id : split(g, '.')) {
    std::size_t used = 0;
    int v = -1;
    try {
      v = std::stoi(id, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != id.size() || v < 0) throw std::invalid_argument("bad group id '" + id + "' in grouping '" + g + "'");
    m.grouping.push_back(v);
  }
  return m;
}

}  // namespace

Json record_to_json(const ExperimentRecord& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["n_qubits"] = r.n_qubits;
  Json blocks = Json::array();
  for (const BlockData& b : r.blocks) {
    Json jb;
    jb["order_index"] = b.order_index;
    Json setting = Json::array();
    for (Pauli p : b.setting.axes()) setting.push_back(std::string(1, to_char(p)));
    jb["setting"] = setting;
    Json counts = Json::object();
    for (std::size_t o = 0; o < b.counts.size(); ++o) counts[outcome_label(b.setting.n_qubits(), o)] = b.counts[o];
    jb["counts"] = counts;
    blocks.push_back(jb);
  }
  j["blocks"] = blocks;
  Json meta = Json::object();
  if (r.metadata.seed) meta["seed"] = *r.metadata.seed;
  if (r.metadata.schedule) meta["schedule"] = *r.metadata.schedule;
  if (r.metadata.p) meta["p"] = *r.metadata.p;
  if (r.metadata.drift_sigma) meta["drift_sigma"] = *r.metadata.drift_sigma;
  if (r.metadata.phi0) meta["phi0"] = *r.metadata.phi0;
  if (!r.metadata.notes.empty()) meta["notes"] = r.metadata.notes;
  j["metadata"] = meta;
  return j;
}

ExperimentRecord record_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw FormatError("experiment record must be a JSON object");
    if (!j.contains("schema_version") || j.at("schema_version") != kSchemaVersion) {
      throw FormatError("unsupported experiment schema version (expected " + std::to_string(kSchemaVersion) + ")");
    }
    ExperimentRecord r;
    r.n_qubits = j.at("n_qubits").get<int>();
    for (const Json& jb : j.at("blocks")) {
      BlockData b;
      b.order_index = jb.at("order_index").get<int>();
      std::string axes;
      for (const Json& a : jb.at("setting")) axes += a.get<std::string>();
      b.setting = MeasurementSetting::parse(axes);
      const std::vector<std::string> labels = outcome_labels(b.setting.n_qubits());
      b.counts.assign(labels.size(), 0);
      for (const auto& [key, value] : jb.at("counts").items()) {
        const std::string label = normalize_label(key);
        const auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) throw FormatError("unknown outcome label '" + key + "' for setting " + axes);
        b.counts[static_cast<std::size_t>(it - labels.begin())] = value.get<std::int64_t>();
      }
      r.blocks.push_back(std::move(b));
    }
    std::sort(r.blocks.begin(), r.blocks.end(),
              [](const BlockData& a, const BlockData& b) { return a.order_index < b.order_index; });
    if (j.contains("metadata")) {
      const Json& m = j.at("metadata");
      if (m.contains("seed")) r.metadata.seed = m.at("seed").get<std::uint64_t>();
      if (m.contains("schedule")) r.metadata.schedule = m.at("schedule").get<std::string>();
      if (m.contains("p")) r.metadata.p = m.at("p").get<double>();
      if (m.contains("drift_sigma")) r.metadata.drift_sigma = m.at("drift_sigma").get<double>();
      if (m.contains("phi0")) r.metadata.phi0 = m.at("phi0").get<double>();
      if (m.contains("notes")) r.metadata.notes = m.at("notes").get<std::string>();
    }
    validate_record(r);
    return r;
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("invalid experiment record: ") + e.what());
  }
}

std::string dump_record(const ExperimentRecord& r) { return record_to_json(r).dump(2) + "\n"; }

ExperimentRecord parse_record(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw FormatError(std::string("experiment record is not valid JSON: ") + e.what());
  }
  return record_from_json(j);
}

std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FormatError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& p, std::string_view text, bool force) {
  if (!force && std::filesystem::exists(p)) {
    throw std::invalid_argument(p.string() + " exists; pass --force to overwrite");
  }
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::ostringstream ss;
  for (unsigned int i = 0; i < len; ++i) ss << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return ss.str();
}

std::string grouping_summary(const ModelSpec& m) {
  std::string s;
  for (std::size_t i = 0; i < m.grouping.size(); ++i) s += (i ? "." : "") + std::to_string(m.grouping[i]);
  if (m.shared && !m.is_standard()) {
    s += " shared=";
    for (std::size_t i = 0; i < m.shared->size(); ++i) s += (i ? "+" : "") + (*m.shared)[i].str();
  }
  return s;
}

ReportDocument make_report(const AicReport& report, Provenance provenance) {
  ReportDocument doc;
  doc.scoring = report.scoring == Scoring::Aic ? "aic" : "aicc";
  for (std::size_t i = 0; i < report.fitted.size(); ++i) {
    const FittedModel& m = report.fitted[i];
    doc.rows.push_back({m.spec.name, grouping_summary(m.spec), m.method, m.loglik, m.k, m.omega, m.omega_c(),
                        report.deltas[i], report.weights[i]});
  }
  doc.verdict = to_string(report.verdict);
  doc.standard_model = report.fitted[report.standard_index].spec.name;
  doc.provenance = std::move(provenance);
  return doc;
}

Json report_to_json(const ReportDocument& doc) {
  Json j;
  j["schema_version"] = doc.schema_version;
  j["scoring"] = doc.scoring;
  Json rows = Json::array();
  for (const ReportRow& r : doc.rows) {
    Json jr;
    jr["name"] = r.name;
    jr["grouping"] = r.grouping;
    jr["method"] = r.method;
    jr["lnL"] = r.loglik;
    jr["K"] = r.k;
    jr["omega"] = r.omega;
    jr["omega_c"] = r.omega_c ? Json(*r.omega_c) : Json(nullptr);
    jr["delta"] = r.delta;
    jr["weight"] = r.weight;
    rows.push_back(jr);
  }
  j["rows"] = rows;
  j["verdict"] = doc.verdict;
  j["standard_model"] = doc.standard_model;
  if (doc.standard_estimate) j["standard_estimate"] = *doc.standard_estimate;
  if (doc.analytic) j["analytic"] = *doc.analytic;
  j["notes"] = doc.notes;
  Json prov;
  prov["input_sha256"] = doc.provenance.input_sha256;
  prov["seed"] = doc.provenance.seed ? Json(*doc.provenance.seed) : Json(nullptr);
  prov["tool_version"] = doc.provenance.tool_version;
  j["provenance"] = prov;
  return j;
}

std::string dump_report(const ReportDocument& doc) { return report_to_json(doc).dump(2) + "\n"; }

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string format_table(const ReportDocument& doc) {
  std::ostringstream ss;
  ss << std::left << std::setw(28) << "model" << std::right << std::setw(16) << "lnL" << std::setw(5) << "K"
     << std::setw(16) << "Omega" << std::setw(16) << "Omega_c" << std::setw(14) << "delta" << std::setw(11)
     << "weight" << "\n";
  for (const ReportRow& r : doc.rows) {
    ss << std::left << std::setw(28) << r.name << std::right << std::setw(16) << format_double(r.loglik)
       << std::setw(5) << r.k << std::setw(16) << format_double(r.omega) << std::setw(16)
       << (r.omega_c ? format_double(*r.omega_c) : std::string("n/a")) << std::setw(14) << format_double(r.delta)
       << std::setw(11) << format_double(r.weight) << "\n";
  }
  for (const std::string& n : doc.notes) ss << "note: " << n << "\n";
  ss << "verdict: " << doc.verdict << " (standard model: " << doc.standard_model << ", scoring: " << doc.scoring
     << ")\n";
  return ss.str();
}

std::string plot_data_csv(const ExperimentRecord& r) {
  std::ostringstream ss;
  ss << "block_index,setting,n_plus,n_total\n";
  for (const BlockData& b : r.blocks) {
    ss << b.order_index << ',' << b.setting.label() << ',' << b.counts[0] << ',' << b.total() << "\n";
  }
  return ss.str();
}

std::string power_csv(const std::vector<PowerRow>& rows) {
  std::ostringstream ss;
  ss << "sigma,trials,inconsistent,fraction,std_error\n";
  for (const PowerRow& r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.17g,%d,%d,%.17g,%.17g\n", r.sigma, r.trials, r.inconsistent, r.fraction,
                  r.std_error);
    ss << buf;
  }
  return ss.str();
}

ModelSpec parse_model_spec(const std::string& token, const ExperimentRecord& r) {
  ModelSpec m{"", {}, std::nullopt};
  if (token == "standard") {
    m = standard_model(r.blocks.size());
  } else if (token == "per-block") {
    m = per_block_model(r.blocks.size());
  } else if (token == "per-setting") {
    m = per_setting_model(r);
  } else if (token == "halves") {
    m = halves_model(r.blocks.size(), std::nullopt);
  } else if (token.rfind("mask:", 0) == 0) {
    const std::vector<std::string> parts = split(token.substr(5), ':');
    if (parts.size() != 2) throw std::invalid_argument("mask models look like mask:<grouping>:shared=A+B");
    m = grouping_from_token(parts[0], r);
    const std::string& sel = parts[1];
    const std::vector<PauliString> basis = pauli_basis(static_cast<std::size_t>(r.n_qubits));
    if (sel.rfind("shared=", 0) == 0) {
      m.shared = parse_components(sel.substr(7), r.n_qubits);
    } else if (sel.rfind("free=", 0) == 0) {
      const std::vector<PauliString> free = parse_components(sel.substr(5), r.n_qubits);
      std::vector<PauliString> shared;
      std::copy_if(basis.begin(), basis.end(), std::back_inserter(shared),
                   [&](const PauliString& p) { return std::find(free.begin(), free.end(), p) == free.end(); });
      m.shared = std::move(shared);
    } else {
      throw std::invalid_argument("mask selector must start with shared= or free=");
    }
  } else {
    throw std::invalid_argument("unknown model '" + token + "'");
  }
  m.name = token;
  validate_spec(m, r);
  return m;
}

}  // namespace qtomo::io
