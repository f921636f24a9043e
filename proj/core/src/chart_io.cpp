#include "blowup/chart_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "blowup/models.hpp"

namespace blowup {

namespace {

using nlohmann::json;

json iv_json(const Interval& v) { return json::array({v.lo(), v.hi()}); }

Interval iv_parse(const json& j) {
    return Interval(j.at(0).get<double>(), j.at(1).get<double>());
}

json ivec_json(const IVec& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(iv_json(x));
    return out;
}

IVec ivec_parse(const json& j) {
    IVec out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(iv_parse(e));
    return out;
}

json ivecs_json(const std::vector<IVec>& vs) {
    json out = json::array();
    for (const auto& v : vs) out.push_back(ivec_json(v));
    return out;
}

std::vector<IVec> ivecs_parse(const json& j) {
    std::vector<IVec> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(ivec_parse(e));
    return out;
}

} // namespace

std::string chart_to_json_string(const ManifoldChart& chart) {
    json j;
    j["format"] = "blowup-chart";
    j["version"] = 1;

    j["model"]["name"] = chart.model_name.empty() ? chart.field.name : chart.model_name;
    j["model"]["definition"] = model_to_string(chart.field);

    json eq;
    eq["name"] = chart.eq_name;
    eq["location"] = ivec_json(chart.equilibrium.location);
    eq["on_horizon"] = chart.equilibrium.on_horizon;
    eq["eigenvalues"] = ivec_json(chart.equilibrium.eigenvalues);
    eq["eigenvectors"] = ivecs_json(chart.equilibrium.eigenvectors);
    eq["pinned"] = chart.equilibrium.pinned;
    eq["stable_count"] = chart.equilibrium.stable_count;
    json pairs = json::array();
    for (const auto& p : chart.equilibrium.complex_pairs)
        pairs.push_back(json{{"re", p.re}, {"im", p.im}});
    eq["complex_pairs"] = std::move(pairs);
    j["equilibrium"] = std::move(eq);

    json ch;
    ch["m"] = chart.m;
    ch["N"] = chart.N;
    ch["sigma"] = chart.sigma;
    ch["lambda"] = ivec_json(chart.Lambda);
    ch["eigvecs"] = ivecs_json(chart.eigvecs);
    json coeffs;
    to_json(coeffs, chart.coeffs);
    ch["coeffs"] = std::move(coeffs);
    j["chart"] = std::move(ch);

    json cert;
    cert["Y0"] = iv_json(chart.cert.Y0);
    cert["Z0"] = iv_json(chart.cert.Z0);
    cert["Z1"] = iv_json(chart.cert.Z1);
    cert["Z2"] = iv_json(chart.cert.Z2);
    cert["r_star"] = chart.cert.r_star;
    cert["r0"] = iv_json(chart.cert.r0);
    cert["N"] = chart.cert.N;
    j["certificate"] = std::move(cert);

    return j.dump(2) + "\n";
}

ManifoldChart chart_from_json_string(const std::string& text) {
    json j = json::parse(text);
    if (j.at("format").get<std::string>() != "blowup-chart")
        throw DomainError("chart file: unknown format tag");

    ManifoldChart chart;
    chart.model_name = j.at("model").at("name").get<std::string>();
    chart.field = model_from_string(j.at("model").at("definition").get<std::string>(),
                                    "<chart:" + chart.model_name + ">");

    const json& eq = j.at("equilibrium");
    chart.eq_name = eq.at("name").get<std::string>();
    chart.equilibrium.location = ivec_parse(eq.at("location"));
    chart.equilibrium.on_horizon = eq.at("on_horizon").get<bool>();
    chart.equilibrium.eigenvalues = ivec_parse(eq.at("eigenvalues"));
    chart.equilibrium.eigenvectors = ivecs_parse(eq.at("eigenvectors"));
    chart.equilibrium.pinned = eq.at("pinned").get<std::vector<int>>();
    chart.equilibrium.stable_count = eq.at("stable_count").get<int>();
    for (const auto& p : eq.at("complex_pairs"))
        chart.equilibrium.complex_pairs.push_back(
            ComplexPairInfo{p.at("re").get<double>(), p.at("im").get<double>()});

    const json& ch = j.at("chart");
    chart.m = ch.at("m").get<int>();
    chart.N = ch.at("N").get<int>();
    chart.sigma = ch.at("sigma").get<double>();
    chart.Lambda = ivec_parse(ch.at("lambda"));
    chart.eigvecs = ivecs_parse(ch.at("eigvecs"));
    from_json(ch.at("coeffs"), chart.coeffs);

    const json& cert = j.at("certificate");
    chart.cert.Y0 = iv_parse(cert.at("Y0"));
    chart.cert.Z0 = iv_parse(cert.at("Z0"));
    chart.cert.Z1 = iv_parse(cert.at("Z1"));
    chart.cert.Z2 = iv_parse(cert.at("Z2"));
    chart.cert.r_star = cert.at("r_star").get<double>();
    chart.cert.r0 = iv_parse(cert.at("r0"));
    chart.cert.N = cert.at("N").get<int>();

    if (chart.coeffs.n != chart.field.n || chart.coeffs.m != chart.m ||
        chart.coeffs.N != chart.N)
        throw ShapeError("chart file: coefficient shape disagrees with header");
    if ((int)chart.Lambda.size() != chart.m || (int)chart.eigvecs.size() != chart.m)
        throw ShapeError("chart file: eigenpair count disagrees with m");
    return chart;
}

void save_chart(const ManifoldChart& chart, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DomainError("cannot open chart file for writing: " + path);
    os << chart_to_json_string(chart);
    if (!os) throw DomainError("write failed: " + path);
}

ManifoldChart load_chart(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DomainError("cannot open chart file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return chart_from_json_string(buf.str());
}

} // namespace blowup
