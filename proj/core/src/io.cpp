#include "uqcm/io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "uqcm/errors.hpp"

namespace uqcm::io {

using nlohmann::json;

namespace {

json matrix_json(const CMatrix& m, const std::vector<int>& dims) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rrow = json::array(), irow = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return json{{"dims", dims}, {"re", std::move(re)}, {"im", std::move(im)}};
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigInvalid("cannot open for writing: " + file.string());
  out << text;
}

}  // namespace

std::string matrix_to_json(const CMatrix& m, const std::vector<int>& dims) {
  return matrix_json(m, dims).dump(2) + "\n";
}

void write_matrix_json(const std::filesystem::path& file, const CMatrix& m,
                       const std::vector<int>& dims) {
  write_text(file, matrix_to_json(m, dims));
}

CMatrix read_matrix_json(const std::filesystem::path& file, std::vector<int>* dims) {
  std::ifstream in(file);
  if (!in) throw ConfigInvalid("cannot open: " + file.string());
  json j = json::parse(in);
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  const Eigen::Index rows = static_cast<Eigen::Index>(re.size());
  const Eigen::Index cols = rows ? static_cast<Eigen::Index>(re[0].size()) : 0;
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = Complex(re[i][k].get<double>(), im[i][k].get<double>());
  if (dims) *dims = j.at("dims").get<std::vector<int>>();
  return m;
}

std::string state_to_json(const CVector& v, const std::vector<int>& dims) {
  json amps = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    amps.push_back(json::array({v[i].real(), v[i].imag()}));
  return json{{"dims", dims}, {"amplitudes", std::move(amps)}}.dump(2) + "\n";
}

void write_state_json(const std::filesystem::path& file, const CVector& v,
                      const std::vector<int>& dims) {
  write_text(file, state_to_json(v, dims));
}

std::string clone_report_to_json(const metrics::CloneReport& r) {
  return json{{"input", r.input_label},
              {"layer", r.layer},
              {"fidelity_q2", r.fidelity_q2},
              {"fidelity_q3", r.fidelity_q3},
              {"concurrence_q1q2", r.concurrence_q1q2},
              {"concurrence_q1q3", r.concurrence_q1q3},
              {"concurrence_q2q3", r.concurrence_q2q3}}
             .dump(2) +
         "\n";
}

std::string csv_cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void write_csv(const std::filesystem::path& file, const std::string& header,
               const std::vector<std::string>& rows) {
  std::string text = header + "\n";
  for (const auto& r : rows) text += r + "\n";
  write_text(file, text);
}

void write_counts_csv(const std::filesystem::path& file,
                      const std::vector<tomography::MeasurementRecord>& records) {
  std::vector<std::string> rows;
  for (const auto& rec : records) {
    const int nq = static_cast<int>(rec.setting.rot.size());
    for (size_t b = 0; b < rec.counts.size(); ++b) {
      std::string bits;
      for (int q = nq - 1; q >= 0; --q) bits += ((b >> q) & 1) ? '1' : '0';
      rows.push_back(rec.setting.name() + "," + bits + "," +
                     std::to_string(rec.counts[b]));
    }
  }
  write_csv(file, "setting,bitstring,count", rows);
}

}  // namespace uqcm::io
