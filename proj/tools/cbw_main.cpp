// cbw: command-line front end for the coupled-MZI wavemeter simulation.
//
// Subcommands cover unitary algebra, netlist parsing, chain verification,
// coupling-phase search, fringe curves, interferogram synthesis, frequency
// fitting, Fisher/CRLB reports, Monte Carlo efficiency studies and M-scaling
// sweeps. All randomness flows from explicit --seed flags; reruns with
// identical flags produce byte-identical outputs.
//
// Exit codes: 0 success, 1 validation/usage error, 2 physics verification
// failure (chain-verify residual above tolerance).

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "cbw.hpp"

namespace {

using cbw::Json;

struct OutputOpts {
    std::string path;            // empty: stdout
    std::string format = "json"; // json | csv
};

void add_output_flags(CLI::App* cmd, OutputOpts& out, const std::string& default_format) {
    out.format = default_format;
    cmd->add_option("-o,--out", out.path, "output file path (default: stdout)");
    cmd->add_option("--format", out.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

void emit(const OutputOpts& out, const std::string& content) {
    if (out.path.empty())
        std::fwrite(content.data(), 1, content.size(), stdout);
    else
        cbw::write_text_file(out.path, content);
}

void emit_report(const OutputOpts& out, const Json& j) {
    if (out.format == "json")
        emit(out, j.dump(2) + "\n");
    else
        emit(out, cbw::json_to_kv_csv(j));
}

cbw::DummyKind parse_kind(const std::string& s) {
    return s == "diag" ? cbw::DummyKind::Diag : cbw::DummyKind::Mzi;
}

cbw::NuisanceMode parse_nuisance(const std::string& s) {
    return s == "known" ? cbw::NuisanceMode::KnownNuisance : cbw::NuisanceMode::FitAll;
}

// Interferogram model flags shared by synth, fisher, mc and scaling.
struct ModelFlags {
    cbw::InterferogramParams params;
    double snr = 0.0;  // when set, overrides sigma as b*mu/snr
};

void add_model_flags(CLI::App* cmd, ModelFlags& mf, bool with_snr) {
    auto& p = mf.params;
    p.f = 7.3;  // default keeps K_M = f*L well inside the asymptotic regime
    cmd->add_option("--f", p.f, "base spatial frequency f (cycles per unit length)")
        ->capture_default_str();
    cmd->add_option("--mu", p.mu, "mean intensity mu (counts per sample)")->capture_default_str();
    cmd->add_option("--a", p.a, "offset a (dimensionless)")->capture_default_str();
    cmd->add_option("--b", p.b, "visibility b in [0,1]")->capture_default_str();
    cmd->add_option("--M", p.m_order, "number of coupled MZIs M")->capture_default_str();
    cmd->add_option("--phase", p.phase_offset, "phase offset (radians)")->capture_default_str();
    cmd->add_option("--m", p.samples, "sample count m")->capture_default_str();
    cmd->add_option("--L", p.wedge_length, "wedge length L (length units)")->capture_default_str();
    auto* sigma = cmd->add_option("--sigma", p.sigma, "Gaussian noise std (counts)")->capture_default_str();
    if (with_snr) {
        auto* snr = cmd->add_option("--snr", mf.snr, "amplitude SNR b*mu/sigma; sets sigma");
        snr->excludes(sigma);
    }
}

void resolve_snr(ModelFlags& mf) {
    if (mf.snr > 0.0) mf.params.sigma = mf.params.b * mf.params.mu / mf.snr;
}

int run_app(int argc, char** argv) {
    CLI::App app{"coupled Mach-Zehnder wavemeter simulation"};
    app.require_subcommand(1);

    // --- unitary -------------------------------------------------------------
    double u_phi = 0.0, u_zeta = 0.0;
    int u_m = 1;
    OutputOpts u_out;
    auto* unitary = app.add_subcommand("unitary", "element matrices and the closed-form comparison");
    unitary->add_option("--phi", u_phi, "longitudinal phase (radians)")->capture_default_str();
    unitary->add_option("--zeta", u_zeta, "transverse phase (radians)")->capture_default_str();
    unitary->add_option("--M", u_m, "closed-form order M")->capture_default_str();
    add_output_flags(unitary, u_out, "json");
    unitary->callback([&] {
        const cbw::MziParams p{u_phi, u_zeta};
        const cbw::Mat2 mzi = cbw::mzi_unitary(p);
        const cbw::Mat2 closed = cbw::cbw_closed_form(p.phi_prime(), u_m);
        const cbw::PhaseMatch strict = cbw::equal_up_to_global_phase(mzi, closed, 1e-9);
        Json j{{"phi", u_phi},
               {"zeta", u_zeta},
               {"M", u_m},
               {"beam_splitter", cbw::matrix_json(cbw::beam_splitter())},
               {"phase_plate", cbw::matrix_json(cbw::phase_plate(p))},
               {"mzi", cbw::matrix_json(mzi)},
               {"closed_form", cbw::matrix_json(closed)},
               {"mzi_vs_closed_form",
                Json{{"equal", strict.equal},
                     {"phase", cbw::json_num(strict.phase)},
                     {"residual", cbw::json_num(strict.residual)}}},
               {"mzi_unitarity_residual",
                cbw::json_num(cbw::max_abs_diff(mzi.adjoint() * mzi, cbw::Mat2::identity()))}};
        emit_report(u_out, j);
    });

    // --- parse ---------------------------------------------------------------
    std::string parse_path, parse_text;
    OutputOpts parse_out;
    auto* parse = app.add_subcommand("parse", "parse a netlist and compile it");
    auto* popt = parse->add_option("--netlist", parse_path, "netlist file path");
    parse->add_option("--text", parse_text, "inline netlist text")->excludes(popt);
    add_output_flags(parse, parse_out, "json");
    parse->callback([&] {
        if (parse_path.empty() && parse_text.empty())
            throw CLI::ValidationError("parse", "one of --netlist or --text is required");
        const std::string text = parse_path.empty() ? parse_text : cbw::read_text_file(parse_path);
        const cbw::NetworkSpec spec = cbw::parse_network(text);
        const cbw::Mat2 u = cbw::compile(spec);
        Json j{{"elements", spec.elements.size()},
               {"canonical", cbw::print_network(spec)},
               {"unitary", cbw::matrix_json(u)},
               {"unitarity_residual",
                cbw::json_num(cbw::max_abs_diff(u.adjoint() * u, cbw::Mat2::identity()))}};
        emit_report(parse_out, j);
    });

    // --- chain-verify ----------------------------------------------------------
    cbw::ChainConfig cv_cfg;
    std::string cv_kind = "mzi", cv_netlist;
    double cv_tol = 1e-9;
    OutputOpts cv_out;
    auto* cv = app.add_subcommand("chain-verify", "compare a CBW chain against the closed form");
    cv->add_option("--M", cv_cfg.m_units, "number of phi-MZIs M")->capture_default_str();
    cv->add_option("--phi", cv_cfg.phi, "longitudinal phase (radians)")->capture_default_str();
    cv->add_option("--zeta", cv_cfg.zeta, "transverse phase (radians)")->capture_default_str();
    cv->add_option("--psi", cv_cfg.psi, "dummy coupling phase (radians)")->capture_default_str();
    cv->add_option("--kind", cv_kind, "dummy coupler kind")
        ->check(CLI::IsMember({"mzi", "diag"}))
        ->capture_default_str();
    cv->add_option("--tol", cv_tol, "max-norm residual tolerance")->capture_default_str();
    cv->add_option("--netlist", cv_netlist, "verify this netlist instead of the built chain");
    add_output_flags(cv, cv_out, "json");

    // --- psi-search ------------------------------------------------------------
    int ps_m = 2, ps_grid = 256;
    double ps_tol = 1e-9;
    std::string ps_kind = "mzi";
    OutputOpts ps_out;
    auto* ps = app.add_subcommand("psi-search", "grid search for the coupling phase psi");
    ps->add_option("--M", ps_m, "number of phi-MZIs M")->capture_default_str();
    ps->add_option("--grid", ps_grid, "number of psi grid points in [0, 2pi)")->capture_default_str();
    ps->add_option("--tol", ps_tol, "target max-norm residual")->capture_default_str();
    ps->add_option("--kind", ps_kind, "dummy coupler kind")
        ->check(CLI::IsMember({"mzi", "diag"}))
        ->capture_default_str();
    add_output_flags(ps, ps_out, "json");
    ps->callback([&] {
        const cbw::PsiSearchResult r = cbw::psi_search(ps_m, ps_tol, ps_grid, parse_kind(ps_kind));
        if (ps_out.format == "csv")
            emit(ps_out, cbw::psi_search_csv(r));
        else
            emit(ps_out, cbw::psi_search_json(r).dump(2) + "\n");
    });

    // --- fringes ---------------------------------------------------------------
    int fr_m = 1, fr_points = 1000;
    double fr_i0 = 1.0, fr_min = 0.0, fr_max = 2.0 * std::numbers::pi;
    OutputOpts fr_out;
    auto* fr = app.add_subcommand("fringes", "ideal intensity curves i0*cos^2, i0*sin^2 of M*phi/2");
    fr->add_option("--M", fr_m, "number of coupled MZIs M")->capture_default_str();
    fr->add_option("--points", fr_points, "number of grid points")->capture_default_str();
    fr->add_option("--i0", fr_i0, "input intensity i0")->capture_default_str();
    fr->add_option("--phi-min", fr_min, "grid start (radians)")->capture_default_str();
    fr->add_option("--phi-max", fr_max, "grid end, exclusive (radians)")->capture_default_str();
    add_output_flags(fr, fr_out, "csv");
    fr->callback([&] {
        if (fr_points < 1) throw CLI::ValidationError("fringes", "--points must be >= 1");
        std::vector<double> grid(static_cast<std::size_t>(fr_points));
        for (int i = 0; i < fr_points; ++i)
            grid[static_cast<std::size_t>(i)] = fr_min + (fr_max - fr_min) * i / fr_points;
        const cbw::FringeCurve c = cbw::ideal_fringes(fr_m, fr_i0, grid);
        if (fr_out.format == "csv") {
            emit(fr_out, cbw::fringe_csv(c));
        } else {
            Json j{{"M", c.m_order}, {"i0", c.i0}, {"phi", c.phi_values}, {"i_a", c.i_a}, {"i_b", c.i_b}};
            emit(fr_out, j.dump(2) + "\n");
        }
    });

    // --- synth -------------------------------------------------------------------
    ModelFlags sy;
    sy.params.samples = 512;
    std::uint64_t sy_seed = 0;
    std::string sy_meta;
    OutputOpts sy_out;
    auto* sy_cmd = app.add_subcommand("synth", "synthesize a noisy interferogram record");
    add_model_flags(sy_cmd, sy, true);
    sy_cmd->add_option("--seed", sy_seed, "noise seed (64-bit)")->capture_default_str();
    sy_cmd->add_option("--meta", sy_meta, "sidecar JSON path (default: <out>.json when --out is set)");
    add_output_flags(sy_cmd, sy_out, "csv");
    sy_cmd->callback([&] {
        resolve_snr(sy);
        const cbw::Interferogram rec = cbw::synthesize(sy.params, sy_seed);
        if (sy_out.format == "csv")
            emit(sy_out, cbw::interferogram_csv(rec));
        else {
            Json j = cbw::sidecar_json(rec);
            j["x"] = rec.x;
            j["y"] = rec.y;
            emit(sy_out, j.dump(2) + "\n");
        }
        std::string meta = sy_meta;
        if (meta.empty() && !sy_out.path.empty()) meta = sy_out.path + ".json";
        if (!meta.empty()) cbw::write_text_file(meta, cbw::sidecar_json(rec).dump(2) + "\n");
    });

    // --- fit ----------------------------------------------------------------------
    std::string fit_in, fit_meta, fit_nuisance = "all";
    double fit_lo = 0.0, fit_hi = 0.0, fit_length = 1.0;
    OutputOpts fit_out;
    auto* fit_cmd = app.add_subcommand("fit", "fit the record frequency and derive the wavelength");
    fit_cmd->add_option("--in", fit_in, "interferogram CSV (header x,y)")->required();
    fit_cmd->add_option("--meta", fit_meta, "sidecar JSON with params and seed");
    fit_cmd->add_option("--f-lo", fit_lo, "window lower edge (cycles per unit length, f_M units)")->required();
    fit_cmd->add_option("--f-hi", fit_hi, "window upper edge (cycles per unit length)")->required();
    fit_cmd->add_option("--L", fit_length, "wedge length L (used when no sidecar)")->capture_default_str();
    fit_cmd->add_option("--nuisance", fit_nuisance, "all: fit 4 params; known: nuisance from sidecar")
        ->check(CLI::IsMember({"all", "known"}))
        ->capture_default_str();
    add_output_flags(fit_cmd, fit_out, "json");
    fit_cmd->callback([&] {
        const cbw::CsvRecord csv = cbw::parse_interferogram_csv(cbw::read_text_file(fit_in));
        cbw::Interferogram rec;
        rec.x = csv.x;
        rec.y = csv.y;
        bool have_meta = !fit_meta.empty();
        if (have_meta) {
            rec.params = cbw::params_from_json(Json::parse(cbw::read_text_file(fit_meta)));
            rec.params.samples = static_cast<int>(rec.x.size());
        } else {
            rec.params.wedge_length = fit_length;
            rec.params.samples = static_cast<int>(rec.x.size());
            rec.params.f = fit_lo;  // placeholder; the fit only uses L and the data
        }
        if (parse_nuisance(fit_nuisance) == cbw::NuisanceMode::KnownNuisance && !have_meta)
            throw CLI::ValidationError("fit", "--nuisance known requires --meta");
        const cbw::FitResult fr_res =
            parse_nuisance(fit_nuisance) == cbw::NuisanceMode::KnownNuisance
                ? cbw::fit_frequency_known_nuisance(rec, {fit_lo, fit_hi})
                : cbw::fit_frequency(rec, {fit_lo, fit_hi});
        Json j{{"fit", cbw::fit_json(fr_res)}};
        if (fr_res.f_hat > 0.0) {
            const cbw::WavelengthEstimate est =
                have_meta ? cbw::wavelength_from_fit(fr_res, rec.params)
                          : cbw::wavelength_from_fit(fr_res, rec.params.wedge_length);
            j["wavelength"] = cbw::wavelength_json(est);
        }
        emit_report(fit_out, j);
    });

    // --- fisher ---------------------------------------------------------------------
    ModelFlags fi;
    fi.params.samples = 512;
    OutputOpts fi_out;
    auto* fi_cmd = app.add_subcommand("fisher", "Fisher information, CRLB and wavelength bounds");
    add_model_flags(fi_cmd, fi, true);
    add_output_flags(fi_cmd, fi_out, "json");
    fi_cmd->callback([&] {
        resolve_snr(fi);
        const std::vector<double> x = cbw::midpoint_grid(fi.params.samples, fi.params.wedge_length);
        const cbw::FisherReport rep = cbw::fisher_information(fi.params, x);
        Json j = cbw::fisher_json(rep);
        j["crlb_var_f_closed"] = cbw::json_num(cbw::crlb(fi.params));
        const cbw::FracWavelengthBound wb = cbw::fractional_wavelength_uncertainty(fi.params);
        j["snr_product"] = cbw::json_num(wb.snr_product);
        emit_report(fi_out, j);
    });

    // --- mc -------------------------------------------------------------------------
    ModelFlags mcf;
    mcf.params.samples = 512;
    int mc_trials = 1000, mc_threads = 1;
    std::uint64_t mc_seed = 0;
    std::string mc_nuisance = "all";
    OutputOpts mc_out;
    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo estimator-efficiency study");
    add_model_flags(mc_cmd, mcf, true);
    mc_cmd->add_option("--trials", mc_trials, "number of trials")->capture_default_str();
    mc_cmd->add_option("--seed", mc_seed, "master seed (64-bit)")->capture_default_str();
    mc_cmd->add_option("--threads", mc_threads, "worker threads (aggregate is thread-invariant)")
        ->capture_default_str();
    mc_cmd->add_option("--nuisance", mc_nuisance, "all: 4-parameter fit; known: frequency-only fit")
        ->check(CLI::IsMember({"all", "known"}))
        ->capture_default_str();
    add_output_flags(mc_cmd, mc_out, "json");
    mc_cmd->callback([&] {
        resolve_snr(mcf);
        const cbw::McOptions opts{mc_threads, parse_nuisance(mc_nuisance), 0.5, 1.5};
        const cbw::McReport rep = cbw::monte_carlo(mcf.params, mc_trials, mc_seed, opts);
        emit_report(mc_out, cbw::mc_json(rep));
    });

    // --- scaling ----------------------------------------------------------------------
    ModelFlags sc;
    sc.params.samples = 512;
    std::vector<int> sc_ms{1, 2, 4, 8};
    int sc_trials = 1000, sc_threads = 1;
    std::uint64_t sc_seed = 0;
    bool sc_fixed_km = false;
    std::string sc_nuisance = "all";
    OutputOpts sc_out;
    auto* sc_cmd = app.add_subcommand("scaling", "Monte Carlo M-scaling sweep with log-log slopes");
    add_model_flags(sc_cmd, sc, true);
    sc_cmd->add_option("--Ms", sc_ms, "list of M values")->delimiter(',')->capture_default_str();
    sc_cmd->add_option("--trials", sc_trials, "trials per M")->capture_default_str();
    sc_cmd->add_option("--seed", sc_seed, "master seed (64-bit)")->capture_default_str();
    sc_cmd->add_option("--threads", sc_threads, "worker threads")->capture_default_str();
    sc_cmd->add_flag("--fixed-km", sc_fixed_km, "scale f as f/M so the fringe count K_M stays fixed");
    sc_cmd->add_option("--nuisance", sc_nuisance, "all | known")
        ->check(CLI::IsMember({"all", "known"}))
        ->capture_default_str();
    add_output_flags(sc_cmd, sc_out, "json");
    sc_cmd->callback([&] {
        resolve_snr(sc);
        const cbw::McOptions opts{sc_threads, parse_nuisance(sc_nuisance), 0.5, 1.5};
        const cbw::ScalingReport rep =
            cbw::scaling_sweep(sc.params, sc_ms, sc_trials, sc_seed, sc_fixed_km, opts);
        emit_report(sc_out, cbw::scaling_json(rep));
    });

    // chain-verify needs its own exit-code handling, so run it after parse.
    // Usage and validation problems all exit 1 (CLI11's own codes are mapped).
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (cv->parsed()) {
        cv_cfg.kind = parse_kind(cv_kind);
        Json j;
        bool pass = false;
        if (!cv_netlist.empty()) {
            const cbw::NetworkSpec spec = cbw::parse_network(cbw::read_text_file(cv_netlist));
            const cbw::Mat2 u = cbw::compile(spec);
            const cbw::detail::AlignedMatch m =
                cbw::detail::align_to_closed_form(u, cv_cfg.phi - cv_cfg.zeta, cv_cfg.m_units);
            pass = m.residual < cv_tol;
            // Basis flags are evaluated over the netlist's own dummy blocks.
            bool preserves = true, compatible = true;
            std::function<void(const std::vector<cbw::Element>&)> scan =
                [&](const std::vector<cbw::Element>& els) {
                    for (const cbw::Element& el : els) {
                        if (const auto* d = std::get_if<cbw::DummyMziEl>(&el.node)) {
                            const cbw::Mat2 dm = cbw::element_unitary(cbw::Element{*d});
                            preserves = preserves && cbw::verify_basis_preservation(dm, 1e-12);
                            compatible = compatible && cbw::basis_set_compatible(dm, 1e-12);
                        } else if (const auto* r = std::get_if<cbw::RepeatEl>(&el.node)) {
                            scan(r->body);
                        }
                    }
                };
            scan(spec.elements);
            j = Json{{"pass", pass},
                     {"residual", cbw::json_num(m.residual)},
                     {"phase", cbw::json_num(m.phase)},
                     {"port_swapped", m.port_swapped},
                     {"phi_prime_sign", m.sign},
                     {"strict_residual", cbw::json_num(m.strict_residual)},
                     {"dummy_preserves_basis", preserves},
                     {"coupler_basis_compatible", compatible}};
        } else {
            const cbw::MthPowerReport rep = cbw::verify_mth_power(cv_cfg, cv_tol);
            pass = rep.pass;
            j = cbw::mth_power_json(rep);
        }
        j["config"] = Json{{"M", cv_cfg.m_units}, {"phi", cv_cfg.phi},     {"zeta", cv_cfg.zeta},
                           {"psi", cv_cfg.psi},   {"kind", cv_kind},       {"tol", cv_tol},
                           {"netlist", cv_netlist}};
        emit_report(cv_out, j);
        return pass ? 0 : 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_app(argc, argv);
    } catch (const cbw::ParseError& e) {
        std::cerr << "netlist error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
