#include "qrm/series.hpp"

#include "qrm/errors.hpp"

namespace qrm {

void ObservableSeries::append(double time, const Observables& o, double p_in_value, double energy_offset)
{
    t.push_back(time);
    x.push_back(o.x);
    p.push_back(o.p);
    q.push_back(o.q);
    sigma_x.push_back(o.sigma_x);
    sigma_z.push_back(o.sigma_z);
    p_in.push_back(p_in_value);
    norm.push_back(o.norm);
    energy.push_back(o.energy - energy_offset);
    leakage.push_back(o.leakage);
    q_tail.push_back(o.q_tail);
}

const std::vector<double>& ObservableSeries::column(std::string_view name) const
{
    return const_cast<ObservableSeries*>(this)->column(name);
}

std::vector<double>& ObservableSeries::column(std::string_view name)
{
    if (name == "t") return t;
    if (name == "x") return x;
    if (name == "p") return p;
    if (name == "q") return q;
    if (name == "sigma_x") return sigma_x;
    if (name == "sigma_z") return sigma_z;
    if (name == "p_in") return p_in;
    if (name == "norm") return norm;
    if (name == "energy") return energy;
    if (name == "leakage") return leakage;
    if (name == "q_tail") return q_tail;
    if (name == "boson_number") return boson_number;
    throw UsageError("unknown observable column '" + std::string(name) + "'");
}

} // namespace qrm
