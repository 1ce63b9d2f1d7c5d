"""Parsing, validation, steady state, and state-space reduction."""
from __future__ import annotations

import json

import numpy as np
import pytest

import qubdoe as q
from conftest import make_bridged, make_divider, make_first_order, make_ladder
from oracles import (implicit_euler, implicit_euler_dae, stamped_matrices,
                     stamped_steady_state)


def doc(**overrides):
    base = {
        "nodes": [{"id": "a", "capacity": 1.0e5}],
        "branches": [{"id": "loss", "from": "REF", "to": "a",
                      "conductance": 10.0, "temperature_source": "T_o"}],
    }
    base.update(overrides)
    return json.dumps(base)


# ---------------------------------------------------------------------------
# parsing and validation
# ---------------------------------------------------------------------------

class TestParsing:
    def test_not_json(self):
        with pytest.raises(q.SchemaError, match="not valid JSON"):
            q.parse_building("{nope")

    def test_top_level_must_be_object(self):
        with pytest.raises(q.SchemaError):
            q.parse_building("[1, 2]")

    def test_unknown_top_level_key(self):
        with pytest.raises(q.SchemaError, match="unexpected field"):
            q.parse_building(doc(extra=1))

    def test_unknown_node_key(self):
        with pytest.raises(q.SchemaError, match="nodes\\[0\\]"):
            q.parse_building(doc(nodes=[{"id": "a", "capacity": 1.0, "x": 2}]))

    def test_missing_capacity(self):
        with pytest.raises(q.SchemaError, match="capacity"):
            q.parse_building(doc(nodes=[{"id": "a"}]))

    def test_capacity_must_be_number(self):
        with pytest.raises(q.SchemaError, match="capacity"):
            q.parse_building(doc(nodes=[{"id": "a", "capacity": "big"}]))

    def test_empty_nodes_rejected(self):
        with pytest.raises(q.SchemaError, match="at least one node"):
            q.parse_building(json.dumps({"nodes": [], "branches": []}))

    def test_empty_branches_rejected(self):
        with pytest.raises(q.SchemaError, match="at least one branch"):
            q.parse_building(doc(branches=[]))

    def test_missing_lists_parse_as_empty(self):
        # no flow_sources / zones keys at all
        circuit = q.parse_building(doc())
        assert circuit.flow_sources == ()
        assert circuit.zones == ()

    def test_duplicate_node_id(self):
        with pytest.raises(q.SchemaError, match="duplicate"):
            q.parse_building(doc(nodes=[{"id": "a", "capacity": 1.0},
                                        {"id": "a", "capacity": 2.0}]))

    def test_ref_reserved(self):
        with pytest.raises(q.SchemaError, match="reserved"):
            q.parse_building(doc(nodes=[{"id": "REF", "capacity": 1.0}]))

    def test_negative_capacity(self):
        with pytest.raises(q.SchemaError, match="capacity"):
            q.parse_building(doc(nodes=[{"id": "a", "capacity": -1.0}]))

    def test_zero_conductance(self):
        with pytest.raises(q.SchemaError, match="conductance"):
            q.parse_building(doc(branches=[{"id": "b", "from": "REF", "to": "a",
                                            "conductance": 0.0,
                                            "temperature_source": "T_o"}]))

    def test_branch_to_ref_needs_reorientation(self):
        with pytest.raises(q.SchemaError, match="orient"):
            q.parse_building(doc(branches=[{"id": "b", "from": "a", "to": "REF",
                                            "conductance": 1.0,
                                            "temperature_source": "T_o"}]))

    def test_unknown_branch_endpoint(self):
        with pytest.raises(q.SchemaError, match="unknown node"):
            q.parse_building(doc(branches=[{"id": "b", "from": "REF", "to": "zz",
                                            "conductance": 1.0,
                                            "temperature_source": "T_o"}]))

    def test_self_loop(self):
        bad = [{"id": "ok", "from": "REF", "to": "a", "conductance": 1.0,
                "temperature_source": "T_o"},
               {"id": "loop", "from": "a", "to": "a", "conductance": 1.0}]
        with pytest.raises(q.SchemaError, match="itself"):
            q.parse_building(doc(branches=bad))

    def test_duplicate_branch_id(self):
        bad = [{"id": "b", "from": "REF", "to": "a", "conductance": 1.0,
                "temperature_source": "T_o"},
               {"id": "b", "from": "REF", "to": "a", "conductance": 2.0,
                "temperature_source": "T_o"}]
        with pytest.raises(q.SchemaError, match="duplicate"):
            q.parse_building(doc(branches=bad))

    def test_flow_source_unknown_node(self):
        with pytest.raises(q.SchemaError, match="unknown node"):
            q.parse_building(doc(flow_sources=[{"node": "zz", "source_name": "P"}]))

    def test_duplicate_flow_source_name(self):
        with pytest.raises(q.SchemaError, match="duplicate"):
            q.parse_building(doc(flow_sources=[{"node": "a", "source_name": "P"},
                                               {"node": "a", "source_name": "P"}]))

    def test_flow_name_clashes_with_temperature_source(self):
        with pytest.raises(q.SchemaError):
            q.parse_building(doc(flow_sources=[{"node": "a", "source_name": "T_o"}]))

    def test_zone_unknown_air_node(self):
        with pytest.raises(q.SchemaError):
            q.parse_building(doc(zones=[{"id": "z", "air_node": "zz",
                                         "floor_area": 10.0, "air_mass": 40.0}]))

    def test_zone_needs_mass_or_volume(self):
        with pytest.raises(q.SchemaError, match="air_mass.*volume|volume.*air_mass"):
            q.parse_building(doc(zones=[{"id": "z", "air_node": "a",
                                         "floor_area": 10.0}]))

    def test_zone_volume_converts_to_mass(self):
        circuit = q.parse_building(doc(zones=[{"id": "z", "air_node": "a",
                                               "floor_area": 10.0, "volume": 50.0}]))
        assert circuit.zones[0].air_mass == pytest.approx(60.0)  # 1.2 kg/m³

    def test_disconnected_node_named(self):
        nodes = [{"id": "a", "capacity": 1.0e5}, {"id": "island", "capacity": 2.0e5}]
        with pytest.raises(q.SchemaError, match="island"):
            q.parse_building(doc(nodes=nodes))

    def test_document_name_round_trip(self):
        circuit = q.parse_building(doc(name="demo box"))
        assert circuit.name == "demo box"
        again = q.parse_building(q.circuit_to_json(circuit))
        assert again == circuit

    def test_round_trip_bundled(self):
        for text in (q.bungalow_json(), q.house_json()):
            circuit = q.parse_building(text)
            assert q.parse_building(q.circuit_to_json(circuit)) == circuit

    def test_round_trip_preserves_floats_exactly(self):
        circuit = make_ladder()
        again = q.parse_building(q.circuit_to_json(circuit))
        for n1, n2 in zip(circuit.nodes, again.nodes):
            assert n1.capacity == n2.capacity


# ---------------------------------------------------------------------------
# source bookkeeping
# ---------------------------------------------------------------------------

class TestSources:
    def test_temperature_sources_in_first_appearance_order(self):
        circuit = make_divider()
        assert circuit.temperature_sources == ("T_a", "T_b")

    def test_input_order_temperatures_then_flows(self):
        model = q.to_state_space(make_first_order(), ["air"])
        assert model.input_names == ("T_o", "P")
        assert model.input_kinds == ("temperature", "flow")

    def test_input_vector_complains_about_missing_and_unknown(self):
        model = q.to_state_space(make_first_order(), ["air"])
        with pytest.raises(q.ModelError, match="unassigned.*P"):
            model.input_vector({"T_o": 0.0})
        with pytest.raises(q.ModelError, match="unknown"):
            model.input_vector({"T_o": 0.0, "P": 0.0, "bogus": 1.0})

    def test_zone_heat_inputs_maps_house(self, house):
        mapping = q.zone_heat_inputs(house)
        assert mapping == {"z1": "P_z1", "z2": "P_z2"}

    def test_zone_heat_inputs_requires_heater(self):
        circuit = q.parse_building(doc(zones=[{"id": "z", "air_node": "a",
                                               "floor_area": 5.0, "air_mass": 10.0}]))
        with pytest.raises(q.ModelError):
            q.zone_heat_inputs(circuit)


# ---------------------------------------------------------------------------
# steady state against the stamping oracle
# ---------------------------------------------------------------------------

class TestSteadyState:
    def test_divider_hand_value(self):
        circuit = make_divider(G1=2.0, G2=3.0)
        theta = q.steady_state(circuit, {"T_a": 10.0, "T_b": 0.0})
        # conductance-weighted average of the two boundaries
        assert theta["mid"] == pytest.approx(4.0, abs=1e-12)

    def test_first_order_with_power(self):
        circuit = make_first_order(G=100.0)
        theta = q.steady_state(circuit, {"T_o": 5.0, "P": 1000.0})
        assert theta["air"] == pytest.approx(15.0, abs=1e-12)

    @pytest.mark.parametrize("make", [make_divider, make_ladder, make_bridged])
    def test_matches_stamping_oracle(self, make):
        circuit = make()
        names = set(circuit.temperature_sources) | set(circuit.flow_source_names)
        values = {name: 7.5 if name.startswith("T") else 850.0 for name in names}
        got = q.steady_state(circuit, values)
        want = stamped_steady_state(circuit, values)
        for node_id, temp in want.items():
            assert got[node_id] == pytest.approx(temp, rel=1e-12)

    def test_bundled_models_against_oracle(self, bungalow, house):
        for circuit in (bungalow, house):
            values = {name: 4.0 for name in circuit.temperature_sources}
            values.update({name: 600.0 for name in circuit.flow_source_names})
            got = q.steady_state(circuit, values)
            want = stamped_steady_state(circuit, values)
            for node_id, temp in want.items():
                assert got[node_id] == pytest.approx(temp, rel=1e-10)

    def test_missing_source_value(self):
        with pytest.raises(q.ModelError, match="unassigned"):
            q.steady_state(make_first_order(), {"T_o": 0.0})


# ---------------------------------------------------------------------------
# nodal conductance reduction
# ---------------------------------------------------------------------------

class TestNodalConductance:
    def test_series_collapse(self):
        # two conductances in series through the star reduce to one
        circuit = make_bridged()
        K = q.nodal_conductance_matrix(circuit, ["a", "b"])
        g_series = 1.0 / (1.0 / 55.0 + 1.0 / 45.0)
        assert K[0, 1] == pytest.approx(-g_series, rel=1e-12)
        assert K[0, 0] == pytest.approx(30.0 + g_series, rel=1e-12)
        assert K[1, 1] == pytest.approx(12.0 + g_series, rel=1e-12)

    def test_symmetric(self, house):
        zones = [z.air_node for z in house.zones]
        K = q.nodal_conductance_matrix(house, zones)
        assert K.shape == (2, 2)
        assert K[0, 1] == pytest.approx(K[1, 0], rel=1e-12)
        # diagonally dominant with positive diagonal
        assert K[0, 0] > 0 and K[1, 1] > 0
        assert K[0, 0] >= -K[0, 1] and K[1, 1] >= -K[1, 0]

    def test_unknown_keep_node(self):
        with pytest.raises(q.ModelError):
            q.nodal_conductance_matrix(make_first_order(), ["zz"])


# ---------------------------------------------------------------------------
# state-space construction and the zero-capacity reduction
# ---------------------------------------------------------------------------

class TestStateSpace:
    def test_first_order_matrices(self):
        model = q.to_state_space(make_first_order(G=100.0, C=1.0e6), ["air"])
        assert model.A == pytest.approx(np.array([[-1.0e-4]]))
        assert model.B == pytest.approx(np.array([[1.0e-4, 1.0e-6]]))
        assert model.C == pytest.approx(np.array([[1.0]]))
        assert model.D == pytest.approx(np.array([[0.0, 0.0]]))

    def test_unknown_output(self):
        with pytest.raises(q.ModelError, match="zz"):
            q.to_state_space(make_first_order(), ["zz"])

    def test_all_zero_capacity_rejected(self):
        bad = json.dumps({
            "nodes": [{"id": "a", "capacity": 0.0}],
            "branches": [{"id": "b", "from": "REF", "to": "a",
                          "conductance": 1.0, "temperature_source": "T_o"}],
        })
        with pytest.raises(q.ModelError, match="capaci"):
            q.to_state_space(q.parse_building(bad), ["a"])

    def test_star_node_dropped_from_states(self):
        model = q.to_state_space(make_bridged(), ["a", "b"])
        assert model.n_states == 2
        assert model.state_names == ("a", "b")

    def test_reduction_matches_series_conductance(self):
        # eliminating the star must produce the exact series conductance
        model = q.to_state_space(make_bridged(), ["a", "b"])
        g_series = 1.0 / (1.0 / 55.0 + 1.0 / 45.0)
        K_expected = np.array([[30.0 + g_series, -g_series],
                               [-g_series, 12.0 + g_series]])
        C_diag = np.array([4.0e5, 7.0e5])
        assert model.A == pytest.approx(-K_expected / C_diag[:, None], rel=1e-12)

    def test_eliminated_node_still_observable(self):
        # asking for the star as an output reconstructs it algebraically
        circuit = make_bridged()
        model = q.to_state_space(circuit, ["a", "star", "b"])
        values = {"T_o": 3.0, "P": 400.0}
        theta = q.steady_state(circuit, values)
        u = model.input_vector(values)
        x_inf = np.linalg.solve(model.A, -model.B @ u)
        y_inf = model.C @ x_inf + model.D @ u
        for k, name in enumerate(model.output_names):
            assert y_inf[k] == pytest.approx(theta[name], rel=1e-12)

    def test_reduced_dynamics_equal_full_dae(self):
        """Backward Euler on the reduced model must track backward Euler
        on the unreduced balance equations to round-off: the star-node
        elimination is exact, not an approximation."""
        circuit = make_bridged()
        model = q.to_state_space(circuit, ["a", "star", "b"])
        K, W, C_diag, node_ids, input_names = stamped_matrices(circuit)
        assert list(input_names) == list(model.input_names)

        u = np.array([2.0, 750.0])  # T_o, P
        dt, n_steps = 30.0, 400
        x_red = implicit_euler(model.A, model.B, u,
                               np.zeros(model.n_states), dt, n_steps)
        theta_full = implicit_euler_dae(K, W, C_diag, u,
                                        np.zeros(len(node_ids)), dt, n_steps)
        y_red = x_red @ model.C.T + model.D @ u
        cols = [node_ids.index(name) for name in model.output_names]
        scale = np.abs(theta_full[:, cols]).max()
        assert np.abs(y_red - theta_full[:, cols]).max() <= 1e-12 * max(scale, 1.0)

    def test_bundled_reduction_equals_full_dae(self, bungalow):
        model = q.to_state_space(bungalow, ["air", "star", "floor_screed"])
        K, W, C_diag, node_ids, input_names = stamped_matrices(bungalow)
        u = model.input_vector({"T_o": 0.0, "P_heat": 1000.0})
        dt, n_steps = 60.0, 300
        x_red = implicit_euler(model.A, model.B, u,
                               np.zeros(model.n_states), dt, n_steps)
        theta_full = implicit_euler_dae(K, W, C_diag, u,
                                        np.zeros(len(node_ids)), dt, n_steps)
        y_red = x_red @ model.C.T + model.D @ u
        cols = [node_ids.index(name) for name in model.output_names]
        scale = np.abs(theta_full[:, cols]).max()
        assert np.abs(y_red - theta_full[:, cols]).max() <= 1e-9 * max(scale, 1.0)

    def test_state_capacities_exposed(self, bungalow_model):
        caps = bungalow_model.state_capacities
        assert caps is not None and np.all(np.asarray(caps) > 0)

    def test_matrices_are_frozen(self, bungalow_model):
        with pytest.raises(ValueError):
            bungalow_model.A[0, 0] = 0.0

    def test_singular_A_rejected(self):
        with pytest.raises(q.NumericalError):
            q.StateSpaceModel(
                A=np.array([[1.0, 1.0], [1.0, 1.0]]),
                B=np.zeros((2, 1)), C=np.eye(2), D=np.zeros((2, 1)),
                state_names=("x", "y"), input_names=("P",),
                input_kinds=("flow",), output_names=("x", "y"),
            )
