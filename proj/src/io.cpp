#include "gsopt/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gsopt/errors.hpp"

namespace gsopt {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("atomic_write: cannot open '" + tmp.string() + "'");
    out << content;
  }
  fs::rename(tmp, target);
}

void write_matrix_csv(const std::string& path, const Mat4& m) {
  std::ostringstream out;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (j) out << ",";
      out << format_double(m(i, j));
    }
    out << "\n";
  }
  atomic_write(path, out.str());
}

void write_matrix_csv(const std::string& path, const Mat4c& m) {
  std::ostringstream out;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (j) out << ",";
      out << format_double(m(i, j).real()) << "," << format_double(m(i, j).imag());
    }
    out << "\n";
  }
  atomic_write(path, out.str());
}

void write_pulse_csv(const std::string& path, const PulseShape& pulse) {
  std::ostringstream out;
  out << "t_ns,ax_rad_per_s,ay_rad_per_s\n";
  for (std::size_t k = 0; k < pulse.ax.size(); ++k)
    out << format_double(sample_time(static_cast<int>(k), pulse.dt) * 1e9) << ","
        << format_double(pulse.ax[k]) << "," << format_double(pulse.ay[k]) << "\n";
  atomic_write(path, out.str());
}

PulseShape read_pulse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("read_pulse_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line).size() != 3)
    throw ValidationError("read_pulse_csv: missing header in '" + path + "'");

  PulseShape pulse;
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3)
      throw ValidationError("read_pulse_csv: malformed row in '" + path + "'");
    try {
      times.push_back(std::stod(fields[0]) * 1e-9);
      pulse.ax.push_back(std::stod(fields[1]));
      pulse.ay.push_back(std::stod(fields[2]));
    } catch (const std::exception&) {
      throw ValidationError("read_pulse_csv: non-numeric field in '" + path + "'");
    }
  }
  if (times.empty()) throw ValidationError("read_pulse_csv: no samples in '" + path + "'");
  const double dt = times.size() > 1 ? times[1] - times[0] : 2.0 * times[0];
  if (dt <= 0.0) throw ValidationError("read_pulse_csv: non-increasing time column");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (std::abs(times[k] - times[k - 1] - dt) > 1e-6 * dt)
      throw ValidationError("read_pulse_csv: non-uniform time grid");
  pulse.dt = dt;
  return pulse;
}

void write_fom_trace_csv(const std::string& path, const OptimizationRecord& record) {
  std::ostringstream out;
  out << "eval_index,superiteration,method,L,N,fom,std_estimate,is_reeval,is_drift_check\n";
  const std::string method = fom_kind_name(record.fom.kind);
  for (const auto& row : record.trace)
    out << row.eval_index << "," << row.superiteration << "," << method << ","
        << record.fom.length << "," << record.fom.n_circuits << ","
        << format_double(row.fom) << "," << format_double(row.std_estimate) << ","
        << (row.is_reeval ? 1 : 0) << "," << (row.is_drift_check ? 1 : 0) << "\n";
  atomic_write(path, out.str());
}

void write_sweep_csv(const std::string& path, const SweepResult& sweep) {
  std::ostringstream out;
  out << "amplitude,mean_fom,std\n";
  for (const auto& p : sweep.points) {
    out << format_double(p.amplitude_factor) << ",";
    if (p.valid)
      out << format_double(p.mean) << "," << format_double(p.std);
    else
      out << ",";
    out << "\n";
  }
  atomic_write(path, out.str());
}

void write_gains_csv(const std::string& path, const std::vector<GainRow>& rows) {
  std::ostringstream out;
  out << "method,L,gain,std,fom_pulse,fom_guess,fom_ref\n";
  for (const auto& r : rows) {
    out << r.method << "," << r.length << ",";
    if (r.defined)
      out << format_double(r.gain) << "," << format_double(r.gain_std);
    else
      out << ",";
    out << "," << format_double(r.fom_pulse) << "," << format_double(r.fom_guess) << ","
        << format_double(r.fom_ref) << "\n";
  }
  atomic_write(path, out.str());
}

std::vector<GainRow> read_gains_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("read_gains_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("read_gains_csv: empty file '" + path + "'");
  const auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "method" || header[1] != "L" || header[2] != "gain")
    throw ValidationError("read_gains_csv: unexpected header in '" + path + "'");

  std::vector<GainRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() < 4)
      throw ValidationError("read_gains_csv: malformed row in '" + path + "'");
    GainRow row;
    row.method = fields[0];
    row.length = std::stoi(fields[1]);
    if (!fields[2].empty()) {
      row.defined = true;
      row.gain = std::stod(fields[2]);
      if (!fields[3].empty()) row.gain_std = std::stod(fields[3]);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_correlation_csv(const std::string& path, const std::vector<std::string>& names,
                           const Eigen::MatrixXd& corr) {
  std::ostringstream out;
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (j) out << ",";
    out << names[j];
  }
  out << "\n";
  for (Eigen::Index i = 0; i < corr.rows(); ++i) {
    for (Eigen::Index j = 0; j < corr.cols(); ++j) {
      if (j) out << ",";
      out << format_double(corr(i, j));
    }
    out << "\n";
  }
  atomic_write(path, out.str());
}

void write_fluence_csv(const std::string& path, const std::vector<FluenceRow>& rows) {
  std::ostringstream out;
  out << "name,fluence_rad2_per_s\n";
  for (const auto& r : rows) out << r.name << "," << format_double(r.value) << "\n";
  atomic_write(path, out.str());
}

void write_rb_csv(const std::string& path, const RbResult& rb) {
  std::ostringstream out;
  out << "m,survival,std\n";
  for (std::size_t i = 0; i < rb.lengths.size(); ++i)
    out << rb.lengths[i] << "," << format_double(rb.survival[i]) << ","
        << format_double(rb.survival_std[i]) << "\n";
  atomic_write(path, out.str());
}

void write_result_json(const std::string& path, const OptimizationRecord& record) {
  nlohmann::ordered_json j;
  j["method"] = fom_kind_name(record.fom.kind);
  j["L"] = record.fom.length;
  j["N"] = record.fom.n_circuits;
  j["gain"] = record.gain_defined ? nlohmann::ordered_json(record.gain)
                                  : nlohmann::ordered_json(nullptr);
  j["fom_guess"] = {{"value", record.fom_guess.value}, {"std", record.fom_guess.std}};
  j["fom_ref"] = {{"value", record.fom_ref.value}, {"std", record.fom_ref.std}};
  j["fom_opt"] = {{"value", record.fom_opt.value}, {"std", record.fom_opt.std}};
  j["sigma"] = record.sigma;
  j["n_evals"] = record.n_evals;
  j["seeds"] = {{"plant", record.plant_seed}, {"run", record.run_seed}};
  atomic_write(path, j.dump(2) + "\n");
}

}  // namespace gsopt
