////////////////////////////////////////////////////////////////////////////////
// report.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Macro-history CSV emission and a small strict CSV reader shared by the
//  plotting and post-processing paths. All writers print with %.17g and
//  never embed timestamps, so identical runs produce identical bytes.
*/
////////////////////////////////////////////////////////////////////////////////
#ifndef FOAMRVE_REPORT_HPP
#define FOAMRVE_REPORT_HPP

#include <foamrve/core.hpp>
#include <foamrve/fe_solve.hpp>

#include <string>
#include <vector>

namespace foamrve {

// Per-step macroscale history: stretch, applied strain, the nine deformation
// gradient and nine stress entries (row major), the Hill-Mandel gap, the
// downscaling residual, energy integrals and wall energy totals.
void write_macro_csv(const std::string &path, const SolutionState &sol);

struct CsvTable {
    std::string origin;  // file path, used in error messages
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index; throws ConfigError naming the file when absent.
    int column(const std::string &name) const;
    // Whole column as numbers; empty cells become NaN.
    std::vector<Real> numeric(const std::string &name) const;
};

CsvTable read_csv(const std::string &path);

void write_text_file(const std::string &path, const std::string &content);

} // namespace foamrve

#endif
