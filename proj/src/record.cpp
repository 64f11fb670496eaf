#include "msid/record.hpp"

#include <cmath>
#include <stdexcept>

#include "msid/csv.hpp"

namespace msid {

void SensorTrajectory::validate(double span) const {
  if (velocity <= 0.0) throw std::invalid_argument("trajectory: velocity > 0");
  if (dt <= 0.0) throw std::invalid_argument("trajectory: dt > 0");
  if (n_samples < 2) throw std::invalid_argument("trajectory: need >= 2 samples");
  if (velocity * (n_samples - 1) * dt > span * (1.0 + 1e-9))
    throw std::invalid_argument("trajectory: sensor leaves the span");
}

SensorTrajectory SensorTrajectory::crossing(double span, double velocity,
                                            double dt, double entry_time) {
  SensorTrajectory tr;
  tr.velocity = velocity;
  tr.entry_time = entry_time;
  tr.dt = dt;
  tr.n_samples = static_cast<int>(std::floor(span / (velocity * dt) + 1e-9)) + 1;
  tr.validate(span);
  return tr;
}

void SensorRecord::validate() const {
  const std::size_t n = time.size();
  if (position.size() != n || acc.size() != n)
    throw std::invalid_argument("record: column length mismatch");
  for (const auto& m : modal)
    if (m.size() != n) throw std::invalid_argument("record: modal length mismatch");
}

void write_record_csv(const std::filesystem::path& path, const SensorRecord& rec) {
  rec.validate();
  std::vector<std::string> header = {"t", "x_I", "acc"};
  std::vector<std::vector<double>> cols = {rec.time, rec.position, rec.acc};
  for (std::size_t m = 0; m < rec.modal.size(); ++m) {
    header.push_back("acc_m" + std::to_string(m + 1));
    cols.push_back(rec.modal[m]);
  }
  write_csv(path, header, cols);
}

SensorRecord read_record_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  SensorRecord rec;
  rec.time = t.column("t");
  rec.position = t.column("x_I");
  rec.acc = t.column("acc");
  for (std::size_t i = 1;; ++i) {
    const std::string name = "acc_m" + std::to_string(i);
    bool found = false;
    for (std::size_t c = 0; c < t.header.size(); ++c)
      if (t.header[c] == name) {
        rec.modal.push_back(t.columns[c]);
        found = true;
      }
    if (!found) break;
  }
  rec.validate();
  return rec;
}

}  // namespace msid
