from django.urls import reverse
from rest_framework import status
from rest_framework.test import APITestCase

from drr.models import EvaluationRun, TrialRecord


class ApiTestCase(APITestCase):

    def setUp(self):
        self.run = EvaluationRun.objects.create(name='smoke', manifest='corpus/manifest.txt',
                                                variants='CE')
        rows = [
            ('a', 'C', 12.0, 1.0), ('a', 'E', 12.0, 0.5),
            ('b', 'C', -1.0, 3.0), ('b', 'E', -1.0, -1.0),
        ]
        for position, (file_id, variant, snr, error) in enumerate(rows):
            TrialRecord.objects.create(
                run=self.run, position=position // 2, file_id=file_id, variant=variant,
                snr_db=snr, noise_kind='white', estimate_db=error, truth_db=0.0, error_db=error,
                cpu_seconds=0.5, wall_seconds=0.6, audio_seconds=2.0,
            )
        self.other = EvaluationRun.objects.create(manifest='other.txt', variants='C')
        TrialRecord.objects.create(run=self.other, file_id='z', variant='C', status='error',
                                   message='cannot read z.wav')


class RunApiTests(ApiTestCase):

    def test_list_runs(self):
        response = self.client.get(reverse('evaluationrun-list'))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual([run['id'] for run in response.data], [self.other.pk, self.run.pk])
        self.assertEqual(response.data[1]['record_count'], 4)

    def test_run_detail(self):
        response = self.client.get(reverse('evaluationrun-detail', args=[self.run.pk]))
        self.assertEqual(response.data['variants'], 'CE')
        self.assertEqual(response.data['name'], 'smoke')

    def test_summary(self):
        response = self.client.get(reverse('evaluationrun-summary', args=[self.run.pk]))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(len(response.data), 4)
        first = response.data[0]
        self.assertEqual(first['condition'], {'variant': 'C', 'snr_db': -1.0, 'noise_kind': 'white'})
        self.assertEqual(first['median'], 3.0)
        self.assertEqual(first['count'], 1)

    def test_summary_grouped_by_variant(self):
        url = reverse('evaluationrun-summary', args=[self.run.pk])
        response = self.client.get(url, {'group_by': 'variant'})
        self.assertEqual([row['condition']['variant'] for row in response.data], ['C', 'E'])
        self.assertEqual(response.data[0]['median'], 2.0)

    def test_bad_group_by(self):
        url = reverse('evaluationrun-summary', args=[self.run.pk])
        response = self.client.get(url, {'group_by': 'room'})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('error', response.data)

    def test_rtf(self):
        response = self.client.get(reverse('evaluationrun-rtf', args=[self.run.pk]))
        self.assertEqual([row['variant'] for row in response.data], ['C', 'E'])
        self.assertEqual(response.data[0]['rtf'], 0.25)
        self.assertEqual(response.data[0]['files'], 2)

    def test_rtf_without_audio(self):
        response = self.client.get(reverse('evaluationrun-rtf', args=[self.other.pk]))
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_plotdata(self):
        response = self.client.get(reverse('evaluationrun-plotdata', args=[self.run.pk]),
                                   {'group_by': 'variant'})
        self.assertEqual(response.data[1]['condition'], 'variant=E')
        self.assertEqual(response.data[1]['quintuple'], [-1.0, -1.0, -0.25, 0.5, 0.5])

    def test_unknown_run(self):
        response = self.client.get(reverse('evaluationrun-summary', args=[9999]))
        self.assertEqual(response.status_code, status.HTTP_404_NOT_FOUND)

    def test_read_only(self):
        response = self.client.post(reverse('evaluationrun-list'), {'manifest': 'x', 'variants': 'C'})
        self.assertEqual(response.status_code, status.HTTP_405_METHOD_NOT_ALLOWED)


class RecordApiTests(ApiTestCase):

    def test_filter_by_run_and_variant(self):
        url = reverse('trialrecord-list')
        response = self.client.get(url, {'run': self.run.pk, 'variant': 'e'})
        self.assertEqual([row['file_id'] for row in response.data], ['a', 'b'])
        self.assertTrue(all(row['variant'] == 'E' for row in response.data))

    def test_records_in_manifest_order(self):
        response = self.client.get(reverse('trialrecord-list'), {'run': self.run.pk})
        self.assertEqual([(row['file_id'], row['variant']) for row in response.data],
                         [('a', 'C'), ('a', 'E'), ('b', 'C'), ('b', 'E')])

    def test_detail_includes_timing(self):
        record = TrialRecord.objects.get(run=self.other)
        response = self.client.get(reverse('trialrecord-detail', args=[record.pk]))
        self.assertEqual(response.data['status'], 'error')
        self.assertEqual(response.data['message'], 'cannot read z.wav')
        self.assertIn('cpu_seconds', response.data)

    def test_bad_run_filter(self):
        response = self.client.get(reverse('trialrecord-list'), {'run': 'latest'})
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
