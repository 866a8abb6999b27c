#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "uqcm/metrics.hpp"
#include "uqcm/tomography.hpp"
#include "uqcm/types.hpp"

namespace uqcm::io {

/// Density/process matrices as JSON with separated real and imaginary parts
/// and the subsystem dimensions recorded.
std::string matrix_to_json(const CMatrix& m, const std::vector<int>& dims);
void write_matrix_json(const std::filesystem::path& file, const CMatrix& m,
                       const std::vector<int>& dims);
CMatrix read_matrix_json(const std::filesystem::path& file, std::vector<int>* dims = nullptr);

/// State vectors as JSON arrays of (re, im) pairs with the shape recorded.
std::string state_to_json(const CVector& v, const std::vector<int>& dims);
void write_state_json(const std::filesystem::path& file, const CVector& v,
                      const std::vector<int>& dims);

std::string clone_report_to_json(const metrics::CloneReport& r);

/// CSV helpers; numeric cells use fixed six-decimal formatting so identical
/// runs produce byte-identical files.
std::string csv_cell(double v);
void write_csv(const std::filesystem::path& file, const std::string& header,
               const std::vector<std::string>& rows);

void write_counts_csv(const std::filesystem::path& file,
                      const std::vector<tomography::MeasurementRecord>& records);

}  // namespace uqcm::io
