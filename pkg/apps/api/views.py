from django_filters.rest_framework import DjangoFilterBackend
from rest_framework import filters, status, viewsets
from rest_framework.response import Response
from rest_framework.views import APIView

from apps.core.exceptions import GradelocError
from apps.geometry.planner import build_plan
from apps.simulation.models import SimulationRun
from .serializers import PlanQuerySerializer, SimulationRunSerializer


class PlanAPIView(APIView):
    """GET /api/plan/?L=75&S=1&G=0.1&T=0.9[&R=84] returns the deployment plan."""

    def get(self, request):
        query = PlanQuerySerializer(data=request.query_params)
        if not query.is_valid():
            return Response(query.errors, status=status.HTTP_400_BAD_REQUEST)
        params = query.validated_data
        try:
            plan = build_plan(
                params['L'],
                params['S'],
                params['G'],
                params['T'],
                range_m=params.get('R'),
                fine_cnt_limit=params['fine_cnt_limit'],
                rows=params['rows'],
                cols=params['cols'],
            )
        except GradelocError as exc:
            return Response({'detail': str(exc)}, status=status.HTTP_400_BAD_REQUEST)
        return Response(plan.to_dict())


class SimulationRunViewSet(viewsets.ReadOnlyModelViewSet):
    queryset = SimulationRun.objects.prefetch_related('reports')
    serializer_class = SimulationRunSerializer

    filter_backends = [DjangoFilterBackend, filters.OrderingFilter]
    filterset_fields = ['scenario_name', 'master_seed', 'replicate']
    ordering_fields = ['created_at', 'master_seed']
