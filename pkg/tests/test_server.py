import pytest

pytest.importorskip("fastapi")

from fastapi.testclient import TestClient

from llgames.game import LEAF_S, tree_to_json
from llgames.server import build_app

THREE_BIT = "((a & b) + (c & d)) & ((e & f) + (g & h))"


@pytest.fixture()
def client():
    return TestClient(build_app())


def new_session(client, **overrides):
    body = {"formula": THREE_BIT}
    body.update(overrides)
    response = client.post("/session", json=body)
    assert response.status_code == 200, response.text
    return response.json()


def test_create_session_initial_view(client):
    data = new_session(client)
    assert data["id"]
    state = data["state"]
    assert state["turn"] == "client"
    assert state["legalMoves"] == ["L", "R"]
    assert state["history"] == []
    assert state["terminated"] is False
    assert state["stuckSide"] is None


def test_full_play_with_engine_interleaving(client):
    data = new_session(client)
    sid = data["id"]

    state = client.post(f"/session/{sid}/move", json={"move": "L"}).json()
    assert [h["side"] for h in state["history"]] == ["client", "server"]
    assert state["history"][0] == {"side": "client", "move": "L"}
    assert state["turn"] == "client"
    assert state["legalMoves"] == ["L", "R"]

    state = client.post(f"/session/{sid}/move", json={"move": "R"}).json()
    assert state["terminated"] is True
    assert state["legalMoves"] == []
    assert len(state["history"]) == 3


def test_refresh_restores_state(client):
    data = new_session(client)
    sid = data["id"]
    after_move = client.post(f"/session/{sid}/move", json={"move": "L"}).json()
    refreshed = client.get(f"/session/{sid}").json()
    assert refreshed == after_move


def test_unknown_session_404(client):
    assert client.get("/session/absent").status_code == 404
    response = client.post("/session/absent/move", json={"move": "L"})
    assert response.status_code == 404


def test_illegal_move_400(client):
    sid = new_session(client)["id"]
    response = client.post(f"/session/{sid}/move", json={"move": "X"})
    assert response.status_code == 400
    assert "no legal move" in response.json()["detail"]


def test_move_after_end_409(client):
    sid = new_session(client)["id"]
    client.post(f"/session/{sid}/move", json={"move": "L"})
    state = client.post(f"/session/{sid}/move", json={"move": "L"}).json()
    assert state["terminated"] is True
    response = client.post(f"/session/{sid}/move", json={"move": "L"})
    assert response.status_code == 409


def test_human_plays_server_side(client):
    data = new_session(client, humanSide="server")
    state = data["state"]
    # the engine owns the client side and has already opened
    assert state["turn"] == "server"
    assert state["history"][0]["side"] == "client"
    sid = data["id"]
    state = client.post(f"/session/{sid}/move", json={"move": "L"}).json()
    assert state["terminated"] is True


def test_session_with_atom_environment(client):
    data = new_session(client, formula="a",
                       atoms={"a": tree_to_json(LEAF_S)}, humanSide="server")
    state = data["state"]
    assert state["stuckSide"] == "server"
    assert state["terminated"] is False
    assert state["legalMoves"] == []


def test_create_session_rejections(client):
    assert client.post("/session", json={"formula": "a -o ("}).status_code == 400
    assert client.post("/session", json={"formula": "a",
                                         "humanSide": "judge"}).status_code == 400
    assert client.post("/session", json={"formula": "!a",
                                         "bangMode": "greedy"}).status_code == 400
    response = client.post("/session", json={"formula": "a",
                                             "atoms": {"a": {"turn": "x"}}})
    assert response.status_code == 400


def test_solve_endpoint(client):
    response = client.post("/solve", json={"formula": "a -o a"})
    assert response.json() == {"winner": "server"}
    response = client.post("/solve", json={
        "formula": "a", "atoms": {"a": tree_to_json(LEAF_S)}})
    assert response.json() == {"winner": "client"}


def test_tree_endpoint_walks_paths(client):
    root = client.get("/game/tree", params={"formula": THREE_BIT}).json()
    assert root == {"turn": "client", "moves": ["L", "R"]}
    deeper = client.get("/game/tree", params={
        "formula": THREE_BIT, "path": "L,L"}).json()
    assert deeper["turn"] == "client"
    leaf = client.get("/game/tree", params={
        "formula": THREE_BIT, "path": "L,L,L"}).json()
    assert leaf == {"turn": "terminated", "moves": []}


def test_tree_endpoint_rejections(client):
    response = client.get("/game/tree", params={
        "formula": THREE_BIT, "path": "L,X"})
    assert response.status_code == 400
    assert "no move" in response.json()["detail"]
    assert client.get("/game/tree",
                      params={"formula": "a -o ("}).status_code == 400


def test_random_engine_is_seeded():
    def transcript(app):
        client = TestClient(app)
        sid = client.post("/session", json={"formula": THREE_BIT}).json()["id"]
        client.post(f"/session/{sid}/move", json={"move": "L"})
        state = client.post(f"/session/{sid}/move", json={"move": "L"}).json()
        return state["history"]

    a = transcript(build_app(engine_mode="random", engine_seed=7))
    b = transcript(build_app(engine_mode="random", engine_seed=7))
    assert a == b
