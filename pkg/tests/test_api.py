"""
HTTP API 테스트 (FastAPI TestClient)
"""

import pytest
from fastapi.testclient import TestClient

from server import app

COIN = {'pom': 'coin', 'prior': 'primitive', 'counts': [1, 1], 'budget': {'samples': 20_000}}


@pytest.fixture(scope='module')
def client():
    return TestClient(app)


def test_health(client):
    response = client.get('/health')
    assert response.status_code == 200
    assert response.json()['poms'] == ['coin', 'crosshair4', 'trine3']


def test_catalogs(client):
    poms = client.get('/api/poms').json()['poms']
    assert poms['trine3']['num_outcomes'] == 3
    priors = client.get('/api/priors').json()['priors']
    assert 'marginal-purity' in priors


def test_regions(client):
    response = client.post('/api/regions', json=COIN)
    assert response.status_code == 200
    body = response.json()
    assert set(body) == {'summary', 'fit', 'curve'}
    assert body['summary']['ratio_limit'] == pytest.approx(1.5, rel=0.05)
    assert len(body['curve']['lambda']) == len(body['curve']['s'])


def test_find(client):
    response = client.post('/api/find', json={**COIN, 'target': 0.5, 'mode': 'size'})
    assert response.status_code == 200
    body = response.json()
    assert body['lambda'] == pytest.approx(0.75, abs=0.03)
    assert len(body['contour']['x']) == 2


def test_invalid_body_is_rejected(client):
    response = client.post('/api/regions', json={'pom': 'coin', 'counts': [1, 1, 1]})
    assert response.status_code == 422
    response = client.post('/api/regions', json={**COIN, 'unknown': 1})
    assert response.status_code == 422


def test_usage_errors_map_to_400(client):
    disk = {'pom': 'trine3', 'prior': 'primitive', 'counts': [1, 1, 1]}
    assert client.post('/api/oracle', json=disk).status_code == 400
    response = client.post('/api/member', json={**COIN, 'target': 0.5})
    assert response.status_code == 400


def test_confidence_of_whole_space(client):
    region_set = {'N': 2, 'regions': {'0': [[0.0, 1.0]], '1': [[0.0, 1.0]], '2': [[0.0, 1.0]]}}
    body = {'pom': 'coin', 'prior': 'primitive', 'confidence': {'region_set': region_set}}
    response = client.post('/api/confidence', json=body)
    assert response.status_code == 200
    assert response.json()['gamma'] == 1.0


def test_oracle_curve(client):
    response = client.post('/api/oracle', json={'pom': 'coin', 'prior': 'jeffreys', 'counts': [1, 1]})
    assert response.status_code == 200
    body = response.json()
    assert body['log_L_max'] - body['log_L_D'] == pytest.approx(0.6931471805599453, abs=1e-9)
