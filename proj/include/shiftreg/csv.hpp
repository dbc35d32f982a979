#pragma once

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <shiftreg/baseline.hpp>
#include <shiftreg/core.hpp>
#include <shiftreg/shift.hpp>
#include <shiftreg/unbounded.hpp>

namespace shiftreg {

  /// File could not be read or written.
  class io_failure : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
  };

  namespace csv {

    /// 17 significant digits, enough to round-trip any double.
    inline std::string format_real(double x) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      return buf;
    }

    inline std::string_view trim(std::string_view s) {
      const auto first = s.find_first_not_of(" \t\r");
      if (first == std::string_view::npos) { return {}; }
      const auto last = s.find_last_not_of(" \t\r");
      return s.substr(first, last - first + 1);
    }

    inline std::vector<std::string> split(std::string_view line) {
      std::vector<std::string> fields;
      std::size_t start = 0;
      for (;;) {
        const auto comma = line.find(',', start);
        fields.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) { break; }
        start = comma + 1;
      }
      return fields;
    }

    inline double parse_real(const std::string& field, std::string_view source, std::size_t line) {
      const char* begin = field.c_str();
      char* end = nullptr;
      errno = 0;
      const double value = std::strtod(begin, &end);
      if (field.empty() || end != begin + field.size() || errno == ERANGE) {
        std::ostringstream os;
        os << source << ":" << line << ": not a number: '" << field << "'";
        throw invalid_input(os.str());
      }
      return value;
    }

    /// Headerless numeric CSV, one matrix row per line. Blank lines are skipped.
    inline Matrix<double> read_matrix(std::istream& in, std::string_view source = "<stream>") {
      std::vector<std::vector<double>> rows;
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) { continue; }
        std::vector<double> row;
        for (const auto& field : split(line)) { row.push_back(parse_real(field, source, line_no)); }
        if (!rows.empty() && row.size() != rows.front().size()) {
          std::ostringstream os;
          os << source << ":" << line_no << ": expected " << rows.front().size() << " columns, found " << row.size();
          throw invalid_input(os.str());
        }
        rows.push_back(std::move(row));
      }
      if (rows.empty()) { throw invalid_input(std::string(source) + ": no data"); }
      Matrix<double> m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
      for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) { m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
      }
      return m;
    }

    inline Vector<double> read_vector(std::istream& in, std::string_view source = "<stream>") {
      const Matrix<double> m = read_matrix(in, source);
      if (m.cols() != 1) {
        throw invalid_input(std::string(source) + ": expected a single-column vector, found " +
                            std::to_string(m.cols()) + " columns");
      }
      return m.col(0);
    }

    inline std::ifstream open_input(const std::string& path) {
      std::ifstream in(path);
      if (!in) { throw invalid_input("cannot open '" + path + "' for reading"); }
      return in;
    }

    inline Matrix<double> read_matrix_file(const std::string& path) {
      auto in = open_input(path);
      return read_matrix(in, path);
    }

    inline Vector<double> read_vector_file(const std::string& path) {
      auto in = open_input(path);
      return read_vector(in, path);
    }

    template <typename Derived>
    std::string format_matrix(const Eigen::MatrixBase<Derived>& m) {
      std::string out;
      for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
          if (j) { out += ','; }
          out += format_real(static_cast<double>(m(i, j)));
        }
        out += '\n';
      }
      return out;
    }

    /// Complex vectors are written as two columns: real, imaginary.
    inline std::string format_complex_vector(const ComplexVector<double>& v) {
      Matrix<double> parts(v.size(), 2);
      parts.col(0) = v.real();
      parts.col(1) = v.imag();
      return format_matrix(parts);
    }

    inline void write_file(const std::string& path, const std::string& content) {
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) { throw io_failure("cannot open '" + path + "' for writing"); }
      out << content;
      out.flush();
      if (!out) { throw io_failure("write to '" + path + "' failed"); }
    }

    /// A headered CSV as text fields.
    struct Table {
      std::vector<std::string> header;
      std::vector<std::vector<std::string>> rows;

      [[nodiscard]] double number(std::size_t row, std::size_t col) const {
        return parse_real(rows.at(row).at(col), "<table>", row + 2);
      }
    };

    inline Table read_table(std::istream& in, std::string_view source = "<stream>") {
      Table t;
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) { continue; }
        auto fields = split(line);
        if (t.header.empty()) {
          t.header = std::move(fields);
          continue;
        }
        if (fields.size() != t.header.size()) {
          std::ostringstream os;
          os << source << ":" << line_no << ": expected " << t.header.size() << " fields, found " << fields.size();
          throw invalid_input(os.str());
        }
        t.rows.push_back(std::move(fields));
      }
      if (t.header.empty()) { throw invalid_input(std::string(source) + ": missing header"); }
      return t;
    }

    inline std::string optional_real(const std::optional<double>& x) {
      return x ? format_real(*x) : std::string("nan");
    }

  } // namespace csv

  // Report serializers. Every report is a header line plus one line per row.

  inline std::string format_report(const ConvergenceReport<double>& report) {
    std::string out = "delta,a,error,bound_eq4,residual\n";
    for (const auto& r : report.rows) {
      out += csv::format_real(r.delta) + ',' + csv::format_real(r.a) + ',' + csv::format_real(r.error) + ',' +
             csv::format_real(r.bound_eq4) + ',' + csv::format_real(r.residual) + '\n';
    }
    return out;
  }

  inline std::string format_report(const std::vector<EvalReport<double>>& rows) {
    std::string out = "delta,n_used,error,bound_eq9,lemma1_norm\n";
    for (const auto& r : rows) {
      out += csv::format_real(r.delta) + ',' + std::to_string(r.n_used) + ',' + csv::optional_real(r.error_vs_Af) +
             ',' + csv::optional_real(r.bound_eq9) + ',' + csv::format_real(r.lemma1_norm) + '\n';
    }
    return out;
  }

  inline std::string format_report(const std::vector<CondReport<double>>& rows) {
    std::string out = "a,kappa_shift,kappa_normal,ratio_check\n";
    for (const auto& r : rows) {
      out += csv::format_real(r.a) + ',' + csv::format_real(r.kappa_shift) + ',' + csv::format_real(r.kappa_normal) +
             ',' + csv::format_real(r.ratio_check) + '\n';
    }
    return out;
  }

  inline std::string format_report(const std::vector<ComparisonRow<double>>& rows) {
    std::string out =
      "delta,a,alpha,error_shift,error_tikhonov,kappa_shift,kappa_normal,ratio_check,flops_shift,flops_tikhonov\n";
    for (const auto& r : rows) {
      out += csv::format_real(r.delta) + ',' + csv::format_real(r.a) + ',' + csv::format_real(r.alpha) + ',' +
             csv::format_real(r.error_shift) + ',' + csv::format_real(r.error_tikhonov) + ',' +
             csv::format_real(r.kappa_shift) + ',' + csv::format_real(r.kappa_normal) + ',' +
             csv::format_real(r.ratio_check) + ',' + std::to_string(r.flops_shift) + ',' +
             std::to_string(r.flops_tikhonov) + '\n';
    }
    return out;
  }

  inline std::string format_report(const std::vector<FlopReport<double>>& rows) {
    std::string out = "method,dim,modeled_flops,measured_seconds,kappa\n";
    for (const auto& r : rows) {
      out += std::string(to_string(r.method)) + ',' + std::to_string(r.dim) + ',' + std::to_string(r.modeled_flops) +
             ',' + csv::format_real(r.measured_seconds) + ',' + csv::format_real(r.kappa) + '\n';
    }
    return out;
  }

  /// Serialize `report` and write it to `path`; throws io_failure on I/O errors.
  template <typename Report>
  void emit_report(const Report& report, const std::string& path) {
    csv::write_file(path, format_report(report));
  }

} // namespace shiftreg
