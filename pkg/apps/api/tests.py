from django.urls import reverse
from rest_framework import status
from rest_framework.test import APITestCase

from apps.simulation.models import NtlReport, SimulationRun


class PlanAPITests(APITestCase):
    def test_default_plan(self):
        response = self.client.get(reverse('plan'), {'L': 75})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['rounded_range'], 84)
        self.assertEqual(response.data['timing']['centroid_interval'], 10)
        self.assertAlmostEqual(response.data['theoretical_mae'], 24.0, delta=0.05)
        self.assertTrue(response.data['connected'])

    def test_explicit_range(self):
        response = self.client.get(reverse('plan'), {'L': 75, 'R': 100})
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['range_used'], 100)
        self.assertTrue(response.data['notes'])

    def test_missing_cell_side(self):
        response = self.client.get(reverse('plan'))
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('L', response.data)

    def test_domain_error(self):
        response = self.client.get(reverse('plan'), {'L': -5})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('detail', response.data)


class SimulationRunAPITests(APITestCase):
    @classmethod
    def setUpTestData(cls):
        for seed in (1, 2):
            run = SimulationRun.objects.create(
                scenario_name='quick-check', master_seed=seed, trace_sha256='0' * 64, duration_s=600,
            )
            NtlReport.objects.create(
                run=run, label='CG', n_samples=590, warmup=10, cle=14000.0, mae=23.7, rmse=26.1,
                within_bound={'3': 0.1}, index_histogram={'3': 59},
            )
        SimulationRun.objects.create(scenario_name='grid-defaults', master_seed=42, trace_sha256='1' * 64, duration_s=10000)

    def test_list(self):
        response = self.client.get(reverse('runs-list'))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['count'], 3)

    def test_filter_by_scenario(self):
        response = self.client.get(reverse('runs-list'), {'scenario_name': 'quick-check'})
        self.assertEqual(response.data['count'], 2)

    def test_filter_by_seed(self):
        response = self.client.get(reverse('runs-list'), {'master_seed': 42})
        self.assertEqual(response.data['count'], 1)
        self.assertEqual(response.data['results'][0]['reports'], [])

    def test_detail_nests_reports(self):
        run = SimulationRun.objects.get(master_seed=1)
        response = self.client.get(reverse('runs-detail', args=[run.pk]))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['reports'][0]['label'], 'CG')
        self.assertEqual(response.data['reports'][0]['within_bound'], {'3': 0.1})

    def test_read_only(self):
        response = self.client.post(reverse('runs-list'), {'scenario_name': 'x'})
        self.assertEqual(response.status_code, status.HTTP_405_METHOD_NOT_ALLOWED)
