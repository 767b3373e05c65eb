#include "eap/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "eap/errors.hpp"

namespace eap {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

}  // namespace

DatasetSeries::DatasetSeries(std::vector<std::string> point_ids,
                             int time_steps, int feature_dim)
    : point_ids_(std::move(point_ids)),
      time_steps_(time_steps),
      feature_dim_(feature_dim) {
  const int n = n_points();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  features_.assign(time_steps_, std::vector<double>(
                                    static_cast<std::size_t>(n) * feature_dim_,
                                    nan));
  active_.assign(time_steps_, std::vector<std::uint8_t>(n, 0));
  labels_.assign(time_steps_, std::vector<int>(n, kNoLabel));
  imputed_.assign(time_steps_,
                  std::vector<std::uint8_t>(
                      static_cast<std::size_t>(n) * feature_dim_, 0));
}

int DatasetSeries::point_index(const std::string& id) const {
  for (int i = 0; i < n_points(); ++i)
    if (point_ids_[i] == id) return i;
  return -1;
}

bool DatasetSeries::has_label(int t, int i) const {
  return labels_[t][i] != kNoLabel;
}

bool DatasetSeries::imputed_any(int t, int i) const {
  for (int f = 0; f < feature_dim_; ++f)
    if (imputed_cell(t, i, f)) return true;
  return false;
}

void DatasetSeries::set_point(int t, int i, const std::vector<double>& values,
                              std::optional<int> label) {
  if (static_cast<int>(values.size()) != feature_dim_)
    fail(ErrorKind::Schema, "feature vector dimension mismatch for point " +
                                point_ids_[i]);
  for (int f = 0; f < feature_dim_; ++f)
    features_[t][static_cast<std::size_t>(i) * feature_dim_ + f] = values[f];
  active_[t][i] = 1;
  labels_[t][i] = label ? *label : kNoLabel;
}

void DatasetSeries::set_inactive(int t, int i) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int f = 0; f < feature_dim_; ++f) {
    features_[t][static_cast<std::size_t>(i) * feature_dim_ + f] = nan;
    imputed_[t][static_cast<std::size_t>(i) * feature_dim_ + f] = 0;
  }
  active_[t][i] = 0;
  labels_[t][i] = kNoLabel;
}

void DatasetSeries::mark_imputed(int t, int i, int f) {
  imputed_[t][static_cast<std::size_t>(i) * feature_dim_ + f] = 1;
}

void DatasetSeries::validate() const {
  if (n_points() == 0 || time_steps_ == 0)
    fail(ErrorKind::EmptyDataset, "dataset has no points or no time steps");
  for (int i = 0; i < n_points(); ++i) {
    bool anywhere = false;
    for (int t = 0; t < time_steps_ && !anywhere; ++t) anywhere = active(t, i);
    if (!anywhere)
      fail(ErrorKind::Schema,
           "point " + point_ids_[i] + " is never active");
  }
}

bool DatasetSeries::operator==(const DatasetSeries& o) const {
  if (point_ids_ != o.point_ids_ || time_steps_ != o.time_steps_ ||
      feature_dim_ != o.feature_dim_ || active_ != o.active_ ||
      labels_ != o.labels_ || imputed_ != o.imputed_)
    return false;
  // NaN-aware feature comparison: inactive cells are NaN on both sides.
  for (int t = 0; t < time_steps_; ++t)
    for (std::size_t k = 0; k < features_[t].size(); ++k) {
      double a = features_[t][k], b = o.features_[t][k];
      if (std::isnan(a) != std::isnan(b)) return false;
      if (!std::isnan(a) && a != b) return false;
    }
  return true;
}

DatasetSeries load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    fail(ErrorKind::EmptyDataset, path + " is empty");
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);

  int id_col = -1, t_col = -1, label_col = -1;
  std::vector<int> feature_cols;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    if (header[c] == schema.id_column)
      id_col = c;
    else if (header[c] == schema.time_column)
      t_col = c;
    else if (header[c] == schema.label_column)
      label_col = c;
    else
      feature_cols.push_back(c);
  }
  if (id_col < 0 || t_col < 0)
    fail(ErrorKind::Schema, path + ": header must contain '" +
                                schema.id_column + "' and '" +
                                schema.time_column + "' columns");
  const int F = static_cast<int>(feature_cols.size());
  if (F == 0) fail(ErrorKind::Schema, path + ": no feature columns");

  struct Row {
    int point;
    int t;
    std::vector<std::optional<double>> values;
    std::optional<int> label;
  };
  std::vector<Row> rows;
  std::vector<std::string> point_order;
  std::map<std::string, int> point_index;
  std::set<std::pair<int, int>> seen;  // (point, t)
  int max_t = 0;
  int line_no = 1;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != static_cast<int>(header.size()))
      fail(ErrorKind::Schema, path + ":" + std::to_string(line_no) +
                                  ": expected " +
                                  std::to_string(header.size()) +
                                  " cells, got " +
                                  std::to_string(cells.size()));
    Row row;
    std::string id = trim(cells[id_col]);
    auto it = point_index.find(id);
    if (it == point_index.end()) {
      it = point_index.emplace(id, static_cast<int>(point_order.size())).first;
      point_order.push_back(id);
    }
    row.point = it->second;
    try {
      row.t = std::stoi(trim(cells[t_col]));
    } catch (const std::exception&) {
      fail(ErrorKind::Schema, path + ":" + std::to_string(line_no) +
                                  ": time step is not an integer");
    }
    if (row.t < 1)
      fail(ErrorKind::Schema, path + ":" + std::to_string(line_no) +
                                  ": time steps start at 1");
    max_t = std::max(max_t, row.t);
    if (!seen.insert({row.point, row.t}).second)
      fail(ErrorKind::Duplicate, path + ":" + std::to_string(line_no) +
                                     ": duplicate (" + id + ", t=" +
                                     std::to_string(row.t) + ")");
    for (int c : feature_cols) {
      std::string cell = trim(cells[c]);
      if (cell.empty()) {
        row.values.push_back(std::nullopt);
      } else {
        try {
          row.values.push_back(std::stod(cell));
        } catch (const std::exception&) {
          fail(ErrorKind::Schema, path + ":" + std::to_string(line_no) +
                                      ": feature cell '" + cell +
                                      "' is not numeric");
        }
      }
    }
    if (label_col >= 0) {
      std::string cell = trim(cells[label_col]);
      if (!cell.empty()) {
        try {
          row.label = std::stoi(cell);
        } catch (const std::exception&) {
          fail(ErrorKind::Schema, path + ":" + std::to_string(line_no) +
                                      ": label is not an integer");
        }
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorKind::EmptyDataset, path + " has no data rows");

  DatasetSeries ds(point_order, max_t, F);
  // First pass: place known values.
  for (const Row& row : rows) {
    std::vector<double> vals(F, std::numeric_limits<double>::quiet_NaN());
    for (int f = 0; f < F; ++f)
      if (row.values[f]) vals[f] = *row.values[f];
    // set_point validates dimension; fill NaN placeholders then impute below.
    ds.set_point(row.t - 1, row.point, vals, row.label);
  }
  // Imputation: previous known value within the point's history, else the
  // first known value ahead.
  for (int i = 0; i < ds.n_points(); ++i) {
    for (int f = 0; f < F; ++f) {
      double last_known = std::numeric_limits<double>::quiet_NaN();
      for (int t = 0; t < ds.time_steps(); ++t) {
        if (!ds.active(t, i)) continue;
        double v = ds.feature(t, i, f);
        if (!std::isnan(v)) last_known = v;
      }
      if (std::isnan(last_known)) {
        bool any_cell_present = false;
        for (int t = 0; t < ds.time_steps(); ++t)
          if (ds.active(t, i)) any_cell_present = true;
        if (any_cell_present)
          fail(ErrorKind::Schema, "point " + ds.point_ids()[i] +
                                      " has no known value for feature " +
                                      std::to_string(f));
        continue;
      }
      // forward fill
      last_known = std::numeric_limits<double>::quiet_NaN();
      for (int t = 0; t < ds.time_steps(); ++t) {
        if (!ds.active(t, i)) continue;
        double v = ds.feature(t, i, f);
        if (std::isnan(v)) {
          if (!std::isnan(last_known)) {
            std::vector<double> vals(F);
            for (int g = 0; g < F; ++g) vals[g] = ds.feature(t, i, g);
            vals[f] = last_known;
            std::optional<int> lab;
            if (ds.has_label(t, i)) lab = ds.label(t, i);
            std::vector<std::uint8_t> imp(F, 0);
            for (int g = 0; g < F; ++g)
              imp[g] = ds.imputed_cell(t, i, g) ? 1 : 0;
            ds.set_point(t, i, vals, lab);
            for (int g = 0; g < F; ++g)
              if (imp[g]) ds.mark_imputed(t, i, g);
            ds.mark_imputed(t, i, f);
          }
        } else {
          last_known = v;
        }
      }
      // backward fill for leading gaps
      double first_known = std::numeric_limits<double>::quiet_NaN();
      for (int t = ds.time_steps() - 1; t >= 0; --t) {
        if (!ds.active(t, i)) continue;
        double v = ds.feature(t, i, f);
        if (std::isnan(v)) {
          std::vector<double> vals(F);
          for (int g = 0; g < F; ++g) vals[g] = ds.feature(t, i, g);
          vals[f] = first_known;
          std::optional<int> lab;
          if (ds.has_label(t, i)) lab = ds.label(t, i);
          std::vector<std::uint8_t> imp(F, 0);
          for (int g = 0; g < F; ++g)
            imp[g] = ds.imputed_cell(t, i, g) ? 1 : 0;
          ds.set_point(t, i, vals, lab);
          for (int g = 0; g < F; ++g)
            if (imp[g]) ds.mark_imputed(t, i, g);
          ds.mark_imputed(t, i, f);
        } else {
          first_known = v;
        }
      }
    }
  }
  ds.validate();
  return ds;
}

void save_csv(const DatasetSeries& ds, const std::string& path,
              const CsvSchema& schema) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  bool any_label = false;
  for (int t = 0; t < ds.time_steps() && !any_label; ++t)
    for (int i = 0; i < ds.n_points() && !any_label; ++i)
      any_label = ds.active(t, i) && ds.has_label(t, i);

  out << schema.id_column << ',' << schema.time_column;
  for (int f = 0; f < ds.feature_dim(); ++f) out << ",f" << f;
  if (any_label) out << ',' << schema.label_column;
  out << '\n';
  out.precision(17);
  // Point-major order: a reload sees points in the same first-appearance
  // order, which makes the round trip exact.
  for (int i = 0; i < ds.n_points(); ++i) {
    for (int t = 0; t < ds.time_steps(); ++t) {
      if (!ds.active(t, i)) continue;
      out << ds.point_ids()[i] << ',' << (t + 1);
      for (int f = 0; f < ds.feature_dim(); ++f) {
        out << ',';
        if (!ds.imputed_cell(t, i, f)) out << ds.feature(t, i, f);
      }
      if (any_label) {
        out << ',';
        if (ds.has_label(t, i)) out << ds.label(t, i);
      }
      out << '\n';
    }
  }
}

DatasetSeries normalize_global(const DatasetSeries& ds) {
  const int F = ds.feature_dim();
  std::vector<double> mean(F, 0.0), sq(F, 0.0);
  std::vector<long> count(F, 0);
  for (int t = 0; t < ds.time_steps(); ++t)
    for (int i = 0; i < ds.n_points(); ++i) {
      if (!ds.active(t, i)) continue;
      for (int f = 0; f < F; ++f) {
        mean[f] += ds.feature(t, i, f);
        ++count[f];
      }
    }
  for (int f = 0; f < F; ++f) mean[f] /= static_cast<double>(count[f]);
  for (int t = 0; t < ds.time_steps(); ++t)
    for (int i = 0; i < ds.n_points(); ++i) {
      if (!ds.active(t, i)) continue;
      for (int f = 0; f < F; ++f) {
        double d = ds.feature(t, i, f) - mean[f];
        sq[f] += d * d;
      }
    }
  std::vector<double> stddev(F);
  for (int f = 0; f < F; ++f) {
    stddev[f] = std::sqrt(sq[f] / static_cast<double>(count[f]));
    if (!(stddev[f] > 0.0))
      fail(ErrorKind::DegenerateFeature,
           "feature " + std::to_string(f) + " has zero variance");
  }

  DatasetSeries out = ds;
  for (int t = 0; t < ds.time_steps(); ++t)
    for (int i = 0; i < ds.n_points(); ++i) {
      if (!ds.active(t, i)) continue;
      std::vector<double> vals(F);
      for (int f = 0; f < F; ++f)
        vals[f] = (ds.feature(t, i, f) - mean[f]) / stddev[f];
      std::optional<int> lab;
      if (ds.has_label(t, i)) lab = ds.label(t, i);
      std::vector<std::uint8_t> imp(F, 0);
      for (int f = 0; f < F; ++f) imp[f] = ds.imputed_cell(t, i, f) ? 1 : 0;
      out.set_point(t, i, vals, lab);
      for (int f = 0; f < F; ++f)
        if (imp[f]) out.mark_imputed(t, i, f);
    }
  return out;
}

DatasetSeries piecewise_normalized_derivative(const DatasetSeries& ds,
                                              int window) {
  if (ds.feature_dim() != 1)
    fail(ErrorKind::Schema,
         "piecewise derivative expects scalar series (F = 1)");
  if (window < 3)
    fail(ErrorKind::InsufficientData,
         "window must cover at least 3 observations");
  const int n_windows = ds.time_steps() / window;
  if (n_windows == 0)
    fail(ErrorKind::InsufficientData, "series shorter than one window");

  DatasetSeries out(ds.point_ids(), n_windows, window - 1);
  for (int w = 0; w < n_windows; ++w) {
    for (int i = 0; i < ds.n_points(); ++i) {
      int obs = 0;
      for (int k = 0; k < window; ++k)
        if (ds.active(w * window + k, i)) ++obs;
      if (obs == 0) continue;  // point absent for the whole window
      if (obs < 3)
        fail(ErrorKind::InsufficientData,
             "point " + ds.point_ids()[i] + " has " + std::to_string(obs) +
                 " observation(s) in window " + std::to_string(w + 1) +
                 "; at least 3 required");
      if (obs < window) continue;  // partial window: inactive at this step
      std::vector<double> diffs(window - 1);
      for (int k = 0; k + 1 < window; ++k)
        diffs[k] = ds.feature(w * window + k + 1, i, 0) -
                   ds.feature(w * window + k, i, 0);
      double mean = 0.0;
      for (double d : diffs) mean += d;
      mean /= static_cast<double>(diffs.size());
      double sq = 0.0;
      for (double d : diffs) sq += (d - mean) * (d - mean);
      double stddev = std::sqrt(sq / static_cast<double>(diffs.size()));
      if (!(stddev > 0.0))
        fail(ErrorKind::InsufficientData,
             "point " + ds.point_ids()[i] + " has constant derivative in window " +
                 std::to_string(w + 1));
      for (double& d : diffs) d = (d - mean) / stddev;
      out.set_point(w, i, diffs);
    }
  }
  out.validate();
  return out;
}

}  // namespace eap
