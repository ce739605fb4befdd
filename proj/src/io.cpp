#include "dhflow/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "dhflow/errors.hpp"
#include "dhflow/kernels.hpp"

namespace dhflow {

const char* const kVersion = "1.0.0";

namespace {

constexpr char kMagic[6] = {'D', 'H', 'F', 'L', 'O', 'W'};
constexpr char kFormat[2] = {'0', '1'};
constexpr std::size_t kHeaderBytes = 8 + 10 * 8;

template <class T>
void put(std::vector<unsigned char>& out, T v) {
    static_assert(sizeof(T) == 8);
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(bits >> (8 * b)));
}

class Reader {
public:
    explicit Reader(std::span<const unsigned char> b) : b_(b) {}

    template <class T>
    T get() {
        if (pos_ + 8 > b_.size()) throw CheckpointError("truncated checkpoint");
        std::uint64_t bits = 0;
        for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(b_[pos_ + k]) << (8 * k);
        pos_ += 8;
        return std::bit_cast<T>(bits);
    }
    std::size_t remaining() const { return b_.size() - pos_; }

private:
    std::span<const unsigned char> b_;
    std::size_t pos_ = kHeaderBytes - 10 * 8;
};

}  // namespace

std::vector<unsigned char> encode_checkpoint(const FlowState& s) {
    const GridSpec& g = s.grid();
    const int q = s.u.q();
    std::vector<unsigned char> out;
    out.reserve(kHeaderBytes + g.size() * static_cast<std::size_t>(q) * 5 * 8);
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    out.insert(out.end(), std::begin(kFormat), std::end(kFormat));
    put<std::int64_t>(out, g.Nx);
    put<std::int64_t>(out, g.Ny);
    put<std::int64_t>(out, g.spin.delta1);
    put<std::int64_t>(out, g.spin.delta2);
    put<std::int64_t>(out, q);
    put<std::int64_t>(out, s.target().kind() == TargetKind::Sphere ? 0 : 1);
    put<double>(out, g.Lx);
    put<double>(out, g.Ly);
    put<double>(out, s.eps);
    put<double>(out, s.t);
    const std::size_t n = g.size();
    for (std::size_t p = 0; p < n; ++p)
        for (int i = 0; i < q; ++i) put<double>(out, s.u.values.plane_ptr(i)[p]);
    for (std::size_t p = 0; p < n; ++p)
        for (int i = 0; i < q; ++i)
            for (int k = 0; k < kChannels; ++k) put<double>(out, s.psi.channel(i, k)[p]);
    return out;
}

FlowState decode_checkpoint(std::span<const unsigned char> bytes) {
    if (bytes.size() < 8) throw CheckpointError("truncated checkpoint");
    if (std::memcmp(bytes.data(), kMagic, 6) != 0) throw CheckpointError("bad magic");
    if (std::memcmp(bytes.data() + 6, kFormat, 2) != 0) throw CheckpointError("unsupported version");
    Reader r(bytes);
    const auto Nx = r.get<std::int64_t>();
    const auto Ny = r.get<std::int64_t>();
    const auto d1 = r.get<std::int64_t>();
    const auto d2 = r.get<std::int64_t>();
    const auto q = r.get<std::int64_t>();
    const auto kind = r.get<std::int64_t>();
    const double Lx = r.get<double>();
    const double Ly = r.get<double>();
    const double eps = r.get<double>();
    const double t = r.get<double>();
    if (Nx < 8 || Ny < 8 || Nx > (1 << 20) || Ny > (1 << 20) || q < 1 || q > 64 || kind < 0 || kind > 1)
        throw CheckpointError("corrupt checkpoint header");
    GridSpec g;
    try {
        g = make_grid(Lx, Ly, static_cast<int>(Nx), static_cast<int>(Ny),
                      {static_cast<int>(d1), static_cast<int>(d2)});
    } catch (const Error& e) {
        throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
    }
    const std::size_t n = g.size();
    const std::size_t need = n * static_cast<std::size_t>(q) * 5 * 8;
    if (r.remaining() < need) throw CheckpointError("truncated checkpoint");
    if (r.remaining() > need) throw CheckpointError("trailing bytes in checkpoint");

    const Target target = kind == 0 ? Target::sphere(static_cast<int>(q))
                                    : Target::flat_torus(static_cast<int>(q));
    MapField u(g, target);
    VectorSpinorField psi(g, static_cast<int>(q));
    for (std::size_t p = 0; p < n; ++p)
        for (int i = 0; i < q; ++i) u.values.plane_ptr(i)[p] = r.get<double>();
    for (std::size_t p = 0; p < n; ++p)
        for (int i = 0; i < q; ++i)
            for (int k = 0; k < kChannels; ++k) psi.channel(i, k)[p] = r.get<double>();
    return FlowState(t, eps, std::move(u), std::move(psi));
}

void write_checkpoint(const FlowState& s, const std::filesystem::path& path) {
    const auto bytes = encode_checkpoint(s);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw CheckpointError("cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw CheckpointError("write failed: " + path.string());
}

FlowState read_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw CheckpointError("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_header(std::size_t n_radii) {
    std::string h =
        "t,E_eps,dirichlet,dirac_pairing,spinor_gradient,psi_l2,psi_l4,psi_sup,kinetic_u,kinetic_psi,"
        "el_residual_u,el_residual_psi";
    for (std::size_t k = 1; k <= n_radii; ++k) h += ",max_local_F_R" + std::to_string(k);
    h += ",dt";
    return h;
}

std::string csv_row(const MonitorRecord& r) {
    const EnergyReport& e = r.energy;
    std::string s;
    for (double v : {r.t, e.E_eps, e.dirichlet, e.dirac_pairing, e.spinor_gradient, e.psi_l2, e.psi_l4,
                     e.psi_sup, r.kinetic_u, r.kinetic_psi, r.el_residual_u, r.el_residual_psi}) {
        s += format_double(v);
        s += ',';
    }
    for (double v : r.max_local_F) {
        s += format_double(v);
        s += ',';
    }
    s += format_double(r.dt);
    return s;
}

void write_run_csv(const std::filesystem::path& path, std::span<const MonitorRecord> records,
                   std::size_t n_radii) {
    std::string text = csv_header(n_radii) + "\n";
    for (const auto& r : records) {
        if (r.max_local_F.size() != n_radii)
            throw Error("record has " + std::to_string(r.max_local_F.size()) + " local-F columns, expected " +
                        std::to_string(n_radii));
        text += csv_row(r) + "\n";
    }
    write_text(path, text);
}

std::string events_json(std::span<const SingularityEvent> events) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : events) {
        nlohmann::ordered_json o;
        o["t_detected"] = e.t_detected;
        o["center"] = {{"ix", e.center.ix}, {"iy", e.center.iy}, {"x", e.x}, {"y", e.y}};
        o["radius"] = e.radius;
        o["local_F"] = e.local_F;
        o["trigger"] = trigger_name(e.trigger);
        arr.push_back(o);
    }
    return arr.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw Error("write failed: " + path.string());
}

std::string conventions_json() {
    nlohmann::ordered_json j;
    j["code_version"] = kVersion;
    j["kernels"] = kernels::active().name;
    j["clifford"] = "gamma_1 = i sigma_1, gamma_2 = i sigma_2; X.Y + Y.X = -2<X,Y>";
    j["riemann"] = "R(X,Y)Z = <Y,Z>X - <X,Z>Y";
    j["second_fundamental_form"] = "sphere: II(X,Y) = -<X,Y>u, P(xi,X) = -<u,xi>X";
    j["spinor_layout"] = "plane i*4 + 2*slot + part, part 0 real, 1 imaginary";
    j["seam"] = "spinor neighbour across a twisted seam is multiplied by -1";
    j["grid"] = "x_i = i*h, row-major, x fastest";
    j["energy"] = "E = 1/2|D+u|^2 + 1/2 Re<psi,Dslash psi> + eps/4 (|Pi D+ psi|^2 + |Pi D- psi|^2)";
    return j.dump(2) + "\n";
}

}  // namespace dhflow
