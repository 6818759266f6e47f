from django.db import migrations, models
import django.db.models.deletion


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='EvolutionRun',
            fields=[
                ('id', models.AutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(max_length=100)),
                ('mode', models.CharField(choices=[('evolve', 'evolve'), ('baseline', 'baseline')], max_length=16)),
                ('seed', models.BigIntegerField()),
                ('output_dir', models.CharField(max_length=500, unique=True)),
                ('config', models.JSONField(default=dict)),
                ('started', models.DateTimeField(auto_now_add=True)),
                ('finished', models.DateTimeField(blank=True, null=True)),
                ('best_tree', models.TextField(blank=True)),
            ],
            options={
                'ordering': ('-started',),
            },
        ),
        migrations.CreateModel(
            name='GenerationStats',
            fields=[
                ('id', models.AutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('generation', models.PositiveIntegerField()),
                ('minimum', models.FloatField()),
                ('mean', models.FloatField()),
                ('maximum', models.FloatField()),
                ('best_fitness', models.FloatField()),
                ('best_tree', models.TextField(blank=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='generations',
                                          to='btevolve.evolutionrun')),
            ],
            options={
                'ordering': ('run', 'generation'),
                'unique_together': {('run', 'generation')},
            },
        ),
    ]
