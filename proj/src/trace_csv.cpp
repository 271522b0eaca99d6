#include "dro/trace_csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dro {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

int count_prefixed(const std::vector<std::string>& names, const std::string& prefix) {
    int n = 0;
    while (true) {
        const std::string want = prefix + "_" + std::to_string(n + 1);
        bool found = false;
        for (const auto& name : names)
            if (name == want) {
                found = true;
                break;
            }
        if (!found) break;
        ++n;
    }
    return n;
}

int index_of(const std::vector<std::string>& names, const std::string& name) {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

}  // namespace

std::string trace_csv_header(const Dimensions& dims) {
    std::ostringstream os;
    os << "t";
    for (int i = 1; i <= dims.n_x; ++i) os << ",x_" << i;
    for (int i = 1; i <= dims.n_x; ++i) os << ",xhat_" << i;
    for (int i = 1; i <= dims.n_x; ++i) os << ",zbar_" << i;
    for (int i = 1; i <= dims.p; ++i) os << ",thetahat_" << i;
    for (int i = 1; i <= dims.p; ++i) os << ",thetatilde_" << i;
    os << ",delta,det_phi,min_eig_phi";
    for (int i = 1; i <= dims.p; ++i) os << ",eps_" << i;
    os << ",swap_residual,V0";
    return os.str();
}

void write_trace_csv(const Trace& trace, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open output file '" + path + "'");

    f << kTraceCsvMarker << "\n" << trace_csv_header(trace.dims) << "\n";
    for (size_t r = 0; r < trace.rows(); ++r) {
        std::ostringstream os;
        os << fmt17(trace.t[r]);
        const auto put_vec = [&](const Eigen::VectorXd& v) {
            for (Eigen::Index i = 0; i < v.size(); ++i) os << "," << fmt17(v(i));
        };
        put_vec(trace.x[r]);
        put_vec(trace.x_hat[r]);
        put_vec(trace.z_bar[r]);
        put_vec(trace.theta_hat[r]);
        put_vec(trace.theta_tilde[r]);
        os << "," << fmt17(trace.delta[r]) << "," << fmt17(trace.det_phi[r]) << ","
           << fmt17(trace.min_eig_phi[r]);
        put_vec(trace.eps[r]);
        os << "," << fmt17(trace.swap_residual[r]) << "," << fmt17(trace.v0[r]);
        f << os.str() << "\n";
    }
    if (!f) throw ConfigError("failed while writing '" + path + "'");
}

Trace read_trace_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open trace file '" + path + "'");

    std::string line;
    if (!std::getline(f, line) || line.rfind(kTraceCsvMarker, 0) != 0)
        throw ConfigError("'" + path + "' is not a v1 trace CSV (missing marker line)");
    if (!std::getline(f, line)) throw ConfigError("'" + path + "' has no header row");

    const std::vector<std::string> names = split_csv_line(line);
    const int n_x = count_prefixed(names, "x");
    const int p = count_prefixed(names, "thetahat");
    const int it = index_of(names, "t");
    const int idelta = index_of(names, "delta");
    const int idet = index_of(names, "det_phi");
    const int imineig = index_of(names, "min_eig_phi");
    const int iswap = index_of(names, "swap_residual");
    const int iv0 = index_of(names, "V0");
    if (n_x < 1 || p < 1 || it < 0 || idelta < 0 || idet < 0 || imineig < 0 || iswap < 0 ||
        iv0 < 0)
        throw ConfigError("'" + path + "' header is missing v1 trace columns");

    const auto col_block = [&](const std::string& prefix, int count) {
        std::vector<int> idx(count);
        for (int i = 0; i < count; ++i) {
            idx[i] = index_of(names, prefix + "_" + std::to_string(i + 1));
            if (idx[i] < 0)
                throw ConfigError("'" + path + "' header is missing column " + prefix + "_" +
                                  std::to_string(i + 1));
        }
        return idx;
    };
    const std::vector<int> ix = col_block("x", n_x);
    const std::vector<int> ixhat = col_block("xhat", n_x);
    const std::vector<int> izbar = col_block("zbar", n_x);
    const std::vector<int> ithetahat = col_block("thetahat", p);
    const std::vector<int> ithetatilde = col_block("thetatilde", p);
    const std::vector<int> ieps = col_block("eps", p);

    Trace trace;
    trace.dims = Dimensions{n_x, 1, 1, p};

    size_t line_no = 2;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() < names.size())
            throw ConfigError("'" + path + "' line " + std::to_string(line_no) +
                              " has too few columns");
        const auto num = [&](int idx) {
            try {
                return std::stod(cells[static_cast<size_t>(idx)]);
            } catch (const std::exception&) {
                throw ConfigError("'" + path + "' line " + std::to_string(line_no) +
                                  ": bad numeric value '" + cells[static_cast<size_t>(idx)] +
                                  "'");
            }
        };
        const auto vec = [&](const std::vector<int>& idx) {
            Eigen::VectorXd v(static_cast<Eigen::Index>(idx.size()));
            for (size_t i = 0; i < idx.size(); ++i) v(static_cast<Eigen::Index>(i)) = num(idx[i]);
            return v;
        };

        trace.t.push_back(num(it));
        trace.x.push_back(vec(ix));
        trace.x_hat.push_back(vec(ixhat));
        trace.z_bar.push_back(vec(izbar));
        trace.theta_hat.push_back(vec(ithetahat));
        trace.theta_tilde.push_back(vec(ithetatilde));
        trace.eps.push_back(vec(ieps));
        trace.delta.push_back(num(idelta));
        trace.det_phi.push_back(num(idet));
        trace.min_eig_phi.push_back(num(imineig));
        trace.swap_residual.push_back(num(iswap));
        trace.v0.push_back(num(iv0));
    }

    if (trace.t.size() >= 2) trace.dt = trace.t[1] - trace.t[0];
    trace.record_every = 1;
    return trace;
}

}  // namespace dro
